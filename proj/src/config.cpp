#include "vmcyl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vmcyl {

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), used for output provenance hashes.

namespace {

inline std::uint32_t rotr(std::uint32_t x, int n)
{
    return (x >> n) | (x << (32 - n));
}

const std::uint32_t sha_k[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
    0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
    0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
    0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
    0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
    0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
    0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
    0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
    0xc67178f2};

} // namespace

std::string sha256_hex(const std::string& data)
{
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::string msg = data;
    const std::uint64_t bit_len = std::uint64_t(data.size()) * 8;
    msg.push_back(char(0x80));
    while (msg.size() % 64 != 56)
        msg.push_back(char(0x00));
    for (int i = 7; i >= 0; --i)
        msg.push_back(char((bit_len >> (8 * i)) & 0xff));

    for (std::size_t off = 0; off < msg.size(); off += 64) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(std::uint8_t(msg[off + 4 * i])) << 24) |
                   (std::uint32_t(std::uint8_t(msg[off + 4 * i + 1])) << 16) |
                   (std::uint32_t(std::uint8_t(msg[off + 4 * i + 2])) << 8) |
                   std::uint32_t(std::uint8_t(msg[off + 4 * i + 3]));
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 =
                rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 =
                rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5],
                      g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + sha_k[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }
    char buf[65];
    for (int i = 0; i < 8; ++i)
        std::snprintf(buf + 8 * i, 9, "%08x", h[i]);
    return std::string(buf, 64);
}

// ---------------------------------------------------------------------------
// key = value parsing

namespace {

struct KeyValue {
    std::string value;
    int line;
    mutable bool used = false;
};

struct KvMap {
    std::map<std::string, KeyValue> entries;
    std::string origin;

    [[noreturn]] void fail(const std::string& msg, int line = 0) const
    {
        throw ConfigError(origin + (line > 0 ? ":" + std::to_string(line) : "") + ": " + msg);
    }

    const KeyValue* find(const std::string& key) const
    {
        auto it = entries.find(key);
        if (it == entries.end())
            return nullptr;
        it->second.used = true;
        return &it->second;
    }

    bool has_prefix(const std::string& prefix) const
    {
        auto it = entries.lower_bound(prefix);
        return it != entries.end() && it->first.compare(0, prefix.size(), prefix) == 0;
    }

    std::string get_string(const std::string& key, const std::string& def) const
    {
        const KeyValue* kv = find(key);
        return kv ? kv->value : def;
    }

    double get_double(const std::string& key, double def) const
    {
        const KeyValue* kv = find(key);
        if (!kv)
            return def;
        try {
            std::size_t pos = 0;
            const double v = std::stod(kv->value, &pos);
            if (pos != kv->value.size())
                fail("trailing characters in number for '" + key + "'", kv->line);
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("cannot parse number for '" + key + "': " + kv->value, kv->line);
        }
    }

    double require_double(const std::string& key) const
    {
        if (!find(key))
            fail("missing required key '" + key + "'");
        return get_double(key, 0.0);
    }

    long get_long(const std::string& key, long def) const
    {
        const KeyValue* kv = find(key);
        if (!kv)
            return def;
        try {
            std::size_t pos = 0;
            const long v = std::stol(kv->value, &pos);
            if (pos != kv->value.size())
                fail("trailing characters in integer for '" + key + "'", kv->line);
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            fail("cannot parse integer for '" + key + "': " + kv->value, kv->line);
        }
    }

    bool get_bool(const std::string& key, bool def) const
    {
        const KeyValue* kv = find(key);
        if (!kv)
            return def;
        if (kv->value == "true" || kv->value == "1" || kv->value == "yes")
            return true;
        if (kv->value == "false" || kv->value == "0" || kv->value == "no")
            return false;
        fail("cannot parse boolean for '" + key + "': " + kv->value, kv->line);
    }
};

KvMap tokenize(const std::string& text, const std::string& origin)
{
    KvMap kv;
    kv.origin = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto trim = [](std::string s) {
            const char* ws = " \t\r\n";
            const std::size_t b = s.find_first_not_of(ws);
            if (b == std::string::npos)
                return std::string();
            const std::size_t e = s.find_last_not_of(ws);
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            kv.fail("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            kv.fail("empty key", lineno);
        if (kv.entries.count(key))
            kv.fail("duplicate key '" + key + "'", lineno);
        kv.entries.emplace(key, KeyValue{value, lineno});
    }
    return kv;
}

RadialProfile load_radial_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open table file: " + path);
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        double a, b;
        if (ls >> a >> b) {
            r.push_back(a);
            v.push_back(b);
        }
    }
    if (r.size() < 2)
        throw ConfigError("table file has fewer than 2 rows: " + path);
    return RadialProfile(r, v);
}

// Tabulated ansatz file: named sections of whitespace-separated numbers.
AnsatzFamily load_ansatz_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open ansatz table file: " + path);
    std::map<std::string, std::vector<double>> sections;
    std::string current;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first))
            continue;
        if (first.back() == ':') {
            current = first.substr(0, first.size() - 1);
            double v;
            while (ls >> v)
                sections[current].push_back(v);
        } else {
            if (current.empty())
                throw ConfigError(path + ": data before any section header");
            std::istringstream ls2(line);
            double v;
            while (ls2 >> v)
                sections[current].push_back(v);
        }
    }
    auto need = [&](const std::string& name) -> std::vector<double>& {
        auto it = sections.find(name);
        if (it == sections.end())
            throw ConfigError(path + ": missing section '" + name + ":'");
        return it->second;
    };
    AnsatzFamily fam;
    fam.kind = AnsatzKind::tabulated;
    fam.table.e = need("axis_e");
    fam.table.f = need("axis_f");
    fam.table.g = need("axis_g");
    fam.table.val = need("values");
    fam.table.finalize();
    fam.table_majorant.e = need("majorant_axis_e");
    fam.table_majorant.g = need("majorant_axis_g");
    fam.table_majorant.val = need("majorant_values");
    fam.table_majorant.finalize();
    fam.table_grad_majorant.e = fam.table_majorant.e;
    fam.table_grad_majorant.g = fam.table_majorant.g;
    fam.table_grad_majorant.val = need("grad_majorant_values");
    fam.table_grad_majorant.finalize();
    return fam;
}

ExternalComponent parse_ext_component(const KvMap& kv, const std::string& prefix, double R)
{
    const std::string kind = kv.get_string(prefix + ".kind", "zero");
    if (kind == "zero")
        return ExternalComponent::zero();
    if (kind == "homogeneous-b" || kind == "linear")
        return ExternalComponent::linear(kv.require_double(prefix + ".coeff"));
    if (kind == "ramp")
        return ExternalComponent::ramp(kv.require_double(prefix + ".coeff"),
                                       kv.get_double(prefix + ".ramp_radius", R));
    if (kind == "constant")
        return ExternalComponent::constant(kv.require_double(prefix + ".coeff"));
    if (kind == "tabulated")
        return ExternalComponent::tabulated(
            load_radial_table(kv.get_string(prefix + ".table_file", "")));
    kv.fail("unknown external potential kind '" + kind + "' for " + prefix);
}

} // namespace

void RunConfig::validate() const
{
    if (!(R0 > 0.0))
        throw ConfigError("R0 must be positive");
    if (!(R > 0.0) || !(R < R0))
        throw ConfigError("confinement radius must satisfy 0 < R < R0");
    if (grid_n < 9)
        throw ConfigError("grid size too small");
    if (species.empty())
        throw ConfigError("species list is empty");
    if (!(solve.tol_fix > 0.0))
        throw ConfigError("solve tolerance must be positive");
    if (solve.max_iter < 1)
        throw ConfigError("max iterations must be positive");
    if (!(verify.horizon > 0.0) || verify.samples < 1)
        throw ConfigError("verify plan invalid");
    try {
        quad.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin)
{
    const KvMap kv = tokenize(text, origin);
    RunConfig cfg;
    try {
        cfg.R0 = kv.get_double("run.R0", 1.0);
        cfg.R = kv.get_double("run.R", 0.7 * cfg.R0);
        cfg.grid_n = std::size_t(kv.get_long("run.grid_n", 257));
        cfg.seed = std::uint64_t(kv.get_long("run.seed", 1));
        cfg.threads = int(kv.get_long("run.threads", 1));
        cfg.out_dir = kv.get_string("run.out_dir", "out");

        for (int idx = 0;; ++idx) {
            const std::string p = "species." + std::to_string(idx) + ".";
            if (!kv.has_prefix(p)) {
                if (idx == 0)
                    kv.fail("no species configured (need species.0.*)");
                break;
            }
            const std::string name = kv.get_string(p + "name", "species" + std::to_string(idx));
            const double mass = kv.require_double(p + "mass");
            const double charge = kv.require_double(p + "charge");
            const std::string kind = kv.get_string(p + "ansatz.kind", "product");
            AnsatzFamily fam;
            if (kind == "product") {
                std::optional<std::pair<double, double>> f_win;
                if (kv.find(p + "ansatz.f_lo") || kv.find(p + "ansatz.f_hi"))
                    f_win = std::pair{kv.require_double(p + "ansatz.f_lo"),
                                      kv.require_double(p + "ansatz.f_hi")};
                fam = AnsatzFamily::product(
                    kv.require_double(p + "ansatz.amplitude"),
                    int(kv.get_long(p + "ansatz.exponent", 4)),
                    kv.require_double(p + "ansatz.energy_cutoff"),
                    kv.get_double(p + "ansatz.energy_floor", 0.0), f_win,
                    {kv.require_double(p + "ansatz.g_lo"), kv.require_double(p + "ansatz.g_hi")},
                    kv.get_bool(p + "ansatz.nontrivial", true));
                if (kv.find(p + "ansatz.g_cutoff"))
                    fam.g_cutoff = kv.get_double(p + "ansatz.g_cutoff", 0.0);
            } else if (kind == "tabulated") {
                fam = load_ansatz_table(kv.get_string(p + "ansatz.table_file", ""));
            } else {
                kv.fail("unknown ansatz kind '" + kind + "'");
            }
            cfg.species.emplace_back(name, mass, charge, std::move(fam));
        }

        cfg.ext.a_phi = parse_ext_component(kv, "ext.a_phi", cfg.R);
        cfg.ext.a_z = parse_ext_component(kv, "ext.a_z", cfg.R);

        cfg.quad.n_theta = int(kv.get_long("quad.n_theta", 48));
        cfg.quad.n_energy = int(kv.get_long("quad.n_energy", 10));
        cfg.quad.n_g = int(kv.get_long("quad.n_g", 12));
        cfg.quad.energy_panels = int(kv.get_long("quad.energy_panels", 4));
        cfg.quad.g_panels = int(kv.get_long("quad.g_panels", 4));
        cfg.quad.guard = kv.get_double("quad.guard", 1e-6);

        cfg.solve.tol_fix = kv.get_double("solve.tol_fix", 1e-10);
        cfg.solve.max_iter = int(kv.get_long("solve.max_iter", 200));
        cfg.solve.relax = kv.get_double("solve.relax", 1.0);
        cfg.solve.threads = cfg.threads;

        const std::string mode = kv.get_string("confine.mode", "none");
        if (mode != "none")
            cfg.confine_mode = parse_pinch_mode(mode);
        cfg.confine_with_solve = kv.get_bool("confine.with_solve", false);

        cfg.verify.samples = int(kv.get_long("verify.samples", 100));
        cfg.verify.horizon = kv.get_double("verify.horizon", 50.0);
        cfg.verify.ode.rel_tol = kv.get_double("verify.ode_tol", 1e-10);
        cfg.verify.ode.abs_tol = cfg.verify.ode.rel_tol;
        cfg.verify.drift_tol = kv.get_double("verify.drift_tol", 1e-6);
        cfg.verify.phi_perturbation = kv.get_double("verify.perturb_phi", 0.0);
        cfg.verify_near_wall = kv.get_bool("verify.near_wall", false);
        cfg.verify.seed = cfg.seed;
        cfg.verify.threads = cfg.threads;

        cfg.sweep.count = int(kv.get_long("sweep.count", 21));
        cfg.sweep.max_scale = kv.get_double("sweep.max_scale", 2.0);
        cfg.extend.factor = kv.get_double("extend.factor", 3.0);
        cfg.extend.density_floor = kv.get_double("extend.density_floor", 1e-12);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }

    for (const auto& [key, val] : kv.entries)
        if (!val.used)
            kv.fail("unknown key '" + key + "'", val.line);
    cfg.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string RunConfig::canonical_text() const
{
    // out_dir and threads are execution environment, not run definition;
    // they stay out of the canonical form so the provenance hash is stable
    // across relocations and worker counts
    std::ostringstream out;
    out << "run.R0 = " << fmt(R0) << "\n";
    out << "run.R = " << fmt(R) << "\n";
    out << "run.grid_n = " << grid_n << "\n";
    out << "run.seed = " << seed << "\n";
    for (std::size_t i = 0; i < species.size(); ++i) {
        const Species& sp = species[i];
        const std::string p = "species." + std::to_string(i) + ".";
        out << p << "name = " << sp.name << "\n";
        out << p << "mass = " << fmt(sp.mass) << "\n";
        out << p << "charge = " << fmt(sp.charge) << "\n";
        if (sp.ansatz.kind == AnsatzKind::product_cutoff) {
            out << p << "ansatz.kind = product\n";
            out << p << "ansatz.amplitude = " << fmt(sp.ansatz.amplitude) << "\n";
            out << p << "ansatz.exponent = " << sp.ansatz.exponent << "\n";
            out << p << "ansatz.energy_cutoff = " << fmt(sp.ansatz.energy_cutoff) << "\n";
            out << p << "ansatz.energy_floor = " << fmt(sp.ansatz.energy_floor) << "\n";
            if (sp.ansatz.f_window.active) {
                out << p << "ansatz.f_lo = " << fmt(sp.ansatz.f_window.lo) << "\n";
                out << p << "ansatz.f_hi = " << fmt(sp.ansatz.f_window.hi) << "\n";
            }
            out << p << "ansatz.g_lo = " << fmt(sp.ansatz.g_window.lo) << "\n";
            out << p << "ansatz.g_hi = " << fmt(sp.ansatz.g_window.hi) << "\n";
            if (sp.ansatz.g_cutoff)
                out << p << "ansatz.g_cutoff = " << fmt(*sp.ansatz.g_cutoff) << "\n";
            out << p << "ansatz.nontrivial = " << (sp.ansatz.nontrivial ? "true" : "false")
                << "\n";
        } else {
            out << p << "ansatz.kind = tabulated\n";
        }
    }
    auto emit_ext = [&](const ExternalComponent& c, const std::string& p) {
        switch (c.kind) {
        case ExternalComponent::Kind::zero:
            out << p << ".kind = zero\n";
            break;
        case ExternalComponent::Kind::linear:
            out << p << ".kind = homogeneous-b\n";
            out << p << ".coeff = " << fmt(c.coeff) << "\n";
            break;
        case ExternalComponent::Kind::ramp:
            out << p << ".kind = ramp\n";
            out << p << ".coeff = " << fmt(c.coeff) << "\n";
            out << p << ".ramp_radius = " << fmt(c.ramp_radius) << "\n";
            break;
        case ExternalComponent::Kind::constant:
            out << p << ".kind = constant\n";
            out << p << ".coeff = " << fmt(c.coeff) << "\n";
            break;
        case ExternalComponent::Kind::tabulated:
            out << p << ".kind = tabulated\n";
            break;
        }
    };
    emit_ext(ext.a_phi, "ext.a_phi");
    emit_ext(ext.a_z, "ext.a_z");
    out << "quad.n_theta = " << quad.n_theta << "\n";
    out << "quad.n_energy = " << quad.n_energy << "\n";
    out << "quad.n_g = " << quad.n_g << "\n";
    out << "quad.energy_panels = " << quad.energy_panels << "\n";
    out << "quad.g_panels = " << quad.g_panels << "\n";
    out << "quad.guard = " << fmt(quad.guard) << "\n";
    out << "solve.tol_fix = " << fmt(solve.tol_fix) << "\n";
    out << "solve.max_iter = " << solve.max_iter << "\n";
    out << "solve.relax = " << fmt(solve.relax) << "\n";
    out << "confine.mode = " << (confine_mode ? pinch_mode_name(*confine_mode) : "none")
        << "\n";
    out << "confine.with_solve = " << (confine_with_solve ? "true" : "false") << "\n";
    out << "verify.samples = " << verify.samples << "\n";
    out << "verify.horizon = " << fmt(verify.horizon) << "\n";
    out << "verify.ode_tol = " << fmt(verify.ode.rel_tol) << "\n";
    out << "verify.drift_tol = " << fmt(verify.drift_tol) << "\n";
    out << "verify.perturb_phi = " << fmt(verify.phi_perturbation) << "\n";
    out << "verify.near_wall = " << (verify_near_wall ? "true" : "false") << "\n";
    out << "sweep.count = " << sweep.count << "\n";
    out << "sweep.max_scale = " << fmt(sweep.max_scale) << "\n";
    out << "extend.factor = " << fmt(extend.factor) << "\n";
    out << "extend.density_floor = " << fmt(extend.density_floor) << "\n";
    return out.str();
}

} // namespace vmcyl
