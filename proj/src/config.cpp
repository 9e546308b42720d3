#include "seit/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

namespace seit {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Line {
    std::string section;
    int section_arg = -1;
    std::string key;
    std::vector<std::string> values;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int section_arg = -1;
    while (std::getline(in, raw)) {
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string first;
        if (!(ls >> first)) continue;
        if (first.front() == '[') {
            std::string rest = raw.substr(raw.find('[') + 1);
            auto close = rest.find(']');
            if (close == std::string::npos)
                throw ContractError("config: unterminated section header: " + raw);
            std::istringstream hs(rest.substr(0, close));
            hs >> section;
            section_arg = -1;
            hs >> section_arg;
            continue;
        }
        Line line;
        line.section = section;
        line.section_arg = section_arg;
        line.key = first;
        std::string eq;
        if (!(ls >> eq) || eq != "=")
            throw ContractError("config: expected 'key = value' in line: " + raw);
        std::string tok;
        while (ls >> tok) line.values.push_back(tok);
        if (line.values.empty())
            throw ContractError("config: missing value in line: " + raw);
        lines.push_back(std::move(line));
    }
    return lines;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ContractError("config: bad number: " + s);
    return v;
}

long long to_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ContractError("config: bad integer: " + s);
    return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.anomaly.pixels.clear();
    std::map<int, PixelRegion> pixels;
    for (const Line& ln : tokenize(text)) {
        const std::string& s = ln.section;
        const std::string& k = ln.key;
        auto one = [&]() -> const std::string& {
            if (ln.values.size() != 1)
                throw ContractError("config: key " + k + " takes one value");
            return ln.values[0];
        };
        if (s == "experiment") {
            if (k == "name") cfg.name = one();
            else throw ContractError("config: unknown key " + k + " in [experiment]");
        } else if (s == "mesh") {
            if (k == "refinement_level") cfg.refinement_level = static_cast<int>(to_int(one()));
            else if (k == "disk_sides") cfg.disk_sides = static_cast<int>(to_int(one()));
            else throw ContractError("config: unknown key " + k + " in [mesh]");
        } else if (s == "currents") {
            if (k == "T") cfg.T = static_cast<int>(to_int(one()));
            else throw ContractError("config: unknown key " + k + " in [currents]");
        } else if (s == "chaos") {
            if (k == "m") cfg.chaos_degree = static_cast<int>(to_int(one()));
            else throw ContractError("config: unknown key " + k + " in [chaos]");
        } else if (s == "noise") {
            if (k == "level") cfg.noise_level = to_double(one());
            else throw ContractError("config: unknown key " + k + " in [noise]");
        } else if (s == "pixel") {
            if (ln.section_arg < 1)
                throw ContractError("config: [pixel N] needs a positive id");
            PixelRegion& px = pixels[ln.section_arg];
            px.id = ln.section_arg;
            if (k == "shape") {
                const std::string& v = one();
                if (v == "disk") px.shape = DiskShape{};
                else if (v == "polygon") px.shape = PolygonShape{};
                else throw ContractError("config: pixel shape must be disk or polygon");
            } else if (k == "center") {
                if (ln.values.size() != 2) throw ContractError("config: center needs x y");
                auto* disk = std::get_if<DiskShape>(&px.shape);
                if (!disk) throw ContractError("config: center given before shape = disk");
                disk->center = Vec2(to_double(ln.values[0]), to_double(ln.values[1]));
            } else if (k == "radius") {
                auto* disk = std::get_if<DiskShape>(&px.shape);
                if (!disk) throw ContractError("config: radius given before shape = disk");
                disk->radius = to_double(one());
            } else if (k == "vertices") {
                auto* poly = std::get_if<PolygonShape>(&px.shape);
                if (!poly) throw ContractError("config: vertices given before shape = polygon");
                if (ln.values.size() < 6 || ln.values.size() % 2 != 0)
                    throw ContractError("config: vertices needs >= 3 coordinate pairs");
                poly->vertices.clear();
                for (std::size_t i = 0; i < ln.values.size(); i += 2)
                    poly->vertices.push_back(
                        Vec2(to_double(ln.values[i]), to_double(ln.values[i + 1])));
            } else if (k == "interval") {
                if (ln.values.size() != 2) throw ContractError("config: interval needs a b");
                px.contrast_lo = to_double(ln.values[0]);
                px.contrast_hi = to_double(ln.values[1]);
            } else {
                throw ContractError("config: unknown key " + k + " in [pixel]");
            }
        } else if (s == "method") {
            if (k == "kind") {
                const std::string& v = one();
                if (v == "fm") cfg.method.kind = Method::fm;
                else if (v == "mm") cfg.method.kind = Method::mm;
                else if (v == "both") cfg.method.kind = Method::both;
                else throw ContractError("config: method kind must be fm, mm or both");
            } else if (k == "tau_policy") {
                const std::string& v = one();
                if (v == "auto") cfg.method.tau_policy = TauPolicy::automatic;
                else if (v == "max") cfg.method.tau_policy = TauPolicy::max;
                else if (v == "fixed") cfg.method.tau_policy = TauPolicy::fixed;
                else throw ContractError("config: tau_policy must be auto, max or fixed");
            } else if (k == "tau") cfg.method.tau = static_cast<int>(to_int(one()));
            else if (k == "ball_n") cfg.method.lattice.n = static_cast<int>(to_int(one()));
            else if (k == "ball_clip") cfg.method.lattice.clip = to_double(one());
            else if (k == "ball_radius") cfg.method.lattice.radius = to_double(one());
            else if (k == "beta_policy") {
                const std::string& v = one();
                if (v == "default") cfg.method.beta_policy = BetaPolicy::preset;
                else if (v == "fixed") cfg.method.beta_policy = BetaPolicy::fixed;
                else throw ContractError("config: beta_policy must be default or fixed");
            } else if (k == "beta") cfg.method.beta = to_double(one());
            else if (k == "epsilon_policy") {
                const std::string& v = one();
                if (v == "default") cfg.method.epsilon_policy = EpsilonPolicy::preset;
                else if (v == "fixed") cfg.method.epsilon_policy = EpsilonPolicy::fixed;
                else throw ContractError("config: epsilon_policy must be default or fixed");
            } else if (k == "epsilon") cfg.method.epsilon = to_double(one());
            else throw ContractError("config: unknown key " + k + " in [method]");
        } else if (s == "grid") {
            if (k == "n") cfg.grid.n = static_cast<int>(to_int(one()));
            else if (k == "clip") cfg.grid.clip = to_double(one());
            else throw ContractError("config: unknown key " + k + " in [grid]");
        } else if (s == "validation") {
            if (k == "monte_carlo_samples")
                cfg.validation_samples = static_cast<int>(to_int(one()));
            else throw ContractError("config: unknown key " + k + " in [validation]");
        } else if (s == "run") {
            if (k == "seed") cfg.master_seed = static_cast<std::uint64_t>(to_int(one()));
            else if (k == "out") cfg.out_dir = one();
            else if (k == "threads") cfg.threads = static_cast<int>(to_int(one()));
            else throw ContractError("config: unknown key " + k + " in [run]");
        } else if (s.empty()) {
            throw ContractError("config: key outside any section: " + k);
        } else {
            throw ContractError("config: unknown section [" + s + "]");
        }
    }
    for (auto& [id, px] : pixels) cfg.anomaly.pixels.push_back(px);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "# seit experiment configuration\n";
    out << "[experiment]\nname = " << cfg.name << "\n\n";
    out << "[mesh]\nrefinement_level = " << cfg.refinement_level
        << "\ndisk_sides = " << cfg.disk_sides << "\n\n";
    out << "[currents]\nT = " << cfg.T << "\n\n";
    out << "[chaos]\nm = " << cfg.chaos_degree << "\n\n";
    out << "[noise]\nlevel = " << fmt(cfg.noise_level) << "\n\n";
    for (const PixelRegion& px : cfg.anomaly.pixels) {
        out << "[pixel " << px.id << "]\n";
        if (const auto* disk = std::get_if<DiskShape>(&px.shape)) {
            out << "shape = disk\n";
            out << "center = " << fmt(disk->center.x()) << " " << fmt(disk->center.y())
                << "\n";
            out << "radius = " << fmt(disk->radius) << "\n";
        } else {
            const auto& poly = std::get<PolygonShape>(px.shape);
            out << "shape = polygon\nvertices =";
            for (const Vec2& v : poly.vertices)
                out << " " << fmt(v.x()) << " " << fmt(v.y());
            out << "\n";
        }
        out << "interval = " << fmt(px.contrast_lo) << " " << fmt(px.contrast_hi)
            << "\n\n";
    }
    out << "[method]\nkind = "
        << (cfg.method.kind == Method::fm
                ? "fm"
                : cfg.method.kind == Method::mm ? "mm" : "both")
        << "\n";
    out << "tau_policy = "
        << (cfg.method.tau_policy == TauPolicy::automatic
                ? "auto"
                : cfg.method.tau_policy == TauPolicy::max ? "max" : "fixed")
        << "\n";
    out << "tau = " << cfg.method.tau << "\n";
    out << "ball_n = " << cfg.method.lattice.n << "\n";
    out << "ball_clip = " << fmt(cfg.method.lattice.clip) << "\n";
    out << "ball_radius = " << fmt(cfg.method.lattice.radius) << "\n";
    out << "beta_policy = "
        << (cfg.method.beta_policy == BetaPolicy::preset ? "default" : "fixed") << "\n";
    out << "beta = " << fmt(cfg.method.beta) << "\n";
    out << "epsilon_policy = "
        << (cfg.method.epsilon_policy == EpsilonPolicy::preset ? "default" : "fixed")
        << "\n";
    out << "epsilon = " << fmt(cfg.method.epsilon) << "\n\n";
    out << "[grid]\nn = " << cfg.grid.n << "\nclip = " << fmt(cfg.grid.clip) << "\n\n";
    out << "[validation]\nmonte_carlo_samples = " << cfg.validation_samples << "\n\n";
    out << "[run]\nseed = " << cfg.master_seed << "\nout = " << cfg.out_dir
        << "\nthreads = " << cfg.threads << "\n";
    return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.refinement_level < 0 || cfg.refinement_level > 7)
        throw ContractError("config: refinement_level out of range");
    if (cfg.disk_sides < 8) throw ContractError("config: disk_sides too small");
    if (cfg.T < 1) throw ContractError("config: T must be >= 1");
    if (cfg.chaos_degree < 0) throw ContractError("config: chaos degree must be >= 0");
    if (cfg.noise_level < 0.0) throw ContractError("config: negative noise level");
    if (cfg.grid.n < 2) throw ContractError("config: grid n must be >= 2");
    if (cfg.grid.clip <= 0.0 || cfg.grid.clip > 1.0)
        throw ContractError("config: grid clip must lie in (0, 1]");
    if (cfg.method.lattice.n < 2) throw ContractError("config: ball_n must be >= 2");
    if (cfg.method.lattice.radius <= 0.0)
        throw ContractError("config: ball_radius must be positive");
    if (cfg.method.tau_policy == TauPolicy::fixed &&
        (cfg.method.tau < 1 || cfg.method.tau > 2 * cfg.T))
        throw ContractError("config: fixed tau must lie in [1, 2T]");
    if (cfg.validation_samples < 0)
        throw ContractError("config: monte_carlo_samples must be >= 0");
    MeshOptions opt;
    opt.disk_sides = cfg.disk_sides;
    validate_pixels(cfg.anomaly.pixels, opt);
    for (std::size_t q = 1; q < cfg.anomaly.pixels.size(); ++q)
        if (cfg.anomaly.pixels[q - 1].id >= cfg.anomaly.pixels[q].id)
            throw ContractError("config: pixel ids must be strictly increasing");
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig canon = cfg;
    canon.out_dir = "";
    canon.threads = 0;
    std::string text = serialize_config(canon);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

PixelRegion disk_px(int id, Vec2 c, double r, double a, double b) {
    PixelRegion px;
    px.id = id;
    px.shape = DiskShape{c, r};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

PixelRegion rect_px(int id, double x0, double y0, double x1, double y1, double a,
                    double b) {
    PixelRegion px;
    px.id = id;
    px.shape = PolygonShape{{Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)}};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

// Horizontal slice of the disk (c, R) between c.y+ya and c.y+yb with the
// curved sides sampled counterclockwise.
PixelRegion strip_px(int id, Vec2 c, double R, double ya, double yb, double a,
                     double b) {
    auto half_width = [&](double y) { return std::sqrt(std::max(0.0, R * R - y * y)); };
    const int arc_pts = 9;
    std::vector<Vec2> poly;
    for (int i = 0; i < arc_pts; ++i) {  // right side, bottom to top
        double y = ya + (yb - ya) * i / (arc_pts - 1.0);
        poly.push_back(c + Vec2(half_width(y), y));
    }
    for (int i = 0; i < arc_pts; ++i) {  // left side, top to bottom
        double y = yb - (yb - ya) * i / (arc_pts - 1.0);
        poly.push_back(c + Vec2(-half_width(y), y));
    }
    PixelRegion px;
    px.id = id;
    px.shape = PolygonShape{poly};
    px.contrast_lo = a;
    px.contrast_hi = b;
    return px;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.refinement_level = 3;  // ~31000 vertices for the test1 geometry
    cfg.T = 50;
    cfg.chaos_degree = 3;
    cfg.noise_level = 1e-3;
    cfg.method.kind = Method::fm;
    cfg.master_seed = 2016;

    if (name == "test1") {
        // One conductive disk, theta in [8,10]; E(sigma_A^-1)^-1 ~ 9.97.
        cfg.anomaly.pixels = {disk_px(1, Vec2(0.4, 0.25), 0.25, 8.0, 10.0)};
        cfg.method.kind = Method::both;
    } else if (name == "test2") {
        // Nonconvex resistive block approximated by three squares separated
        // by 0.05 gaps; condition (b) holds with alpha = 0.3.
        cfg.anomaly.pixels = {
            rect_px(1, -0.62, -0.45, -0.29, -0.12, -0.99, -0.41),
            rect_px(2, -0.24, -0.45, 0.09, -0.12, -0.99, -0.01),
            rect_px(3, -0.62, -0.07, -0.29, 0.26, -0.99, 0.39),
        };
    } else if (name == "test3") {
        // Disk of three strip pixels with width-6 intervals (E(sigma^-1)^-1
        // = 6/log(4) ~ 4.33 > 4.3) plus a square of six cells with width-3
        // intervals (3/log(7) ~ 1.54 > 1.5).
        Vec2 c(-0.35, 0.4);
        double R = 0.27;
        cfg.anomaly.pixels = {
            strip_px(1, c, R, -0.265, -0.095, 1.0, 7.0),
            strip_px(2, c, R, -0.065, 0.065, 1.0, 7.0),
            strip_px(3, c, R, 0.095, 0.265, 1.0, 7.0),
        };
        double x0 = 0.11, y0 = -0.54, w = 0.225, h = 0.14, gap = 0.03;
        int id = 4;
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 2; ++col)
                cfg.anomaly.pixels.push_back(
                    rect_px(id++, x0 + col * (w + gap), y0 + row * (h + gap),
                            x0 + col * (w + gap) + w, y0 + row * (h + gap) + h, -0.5,
                            2.5));
    } else if (name == "test4") {
        // Three well separated disks, conductivity uniform in [0.5, 3.5].
        cfg.anomaly.pixels = {
            disk_px(1, Vec2(0.5, 0.0), 0.18, -0.5, 2.5),
            disk_px(2, Vec2(-0.25, 0.43), 0.18, -0.5, 2.5),
            disk_px(3, Vec2(-0.25, -0.43), 0.18, -0.5, 2.5),
        };
    } else {
        throw ContractError("unknown preset: " + name +
                            " (available: test1 test2 test3 test4)");
    }
    validate_config(cfg);
    return cfg;
}

}  // namespace seit
