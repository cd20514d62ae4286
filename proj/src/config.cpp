#include "nlsball/config.hpp"

#include "nlsball/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlsball {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

struct CommandName {
    Command command;
    std::string_view name;
};

constexpr CommandName command_table[] = {
    {Command::SimulateDet, "simulate-det"},
    {Command::SimulateSde, "simulate-sde"},
    {Command::StationaryStats, "stationary-stats"},
    {Command::InviscidSweep, "inviscid-sweep"},
    {Command::GrowthCheck, "growth-check"},
    {Command::VerifyCounting, "verify-counting"},
    {Command::VerifyEigenNorms, "verify-eigen-norms"},
    {Command::VerifyProductNorms, "verify-product-norms"},
    {Command::VerifyMultilinear, "verify-multilinear"},
    {Command::VerifyRadialSobolev, "verify-radial-sobolev"},
};

} // namespace

std::string_view to_string(Command c)
{
    for (const auto& e : command_table)
        if (e.command == c)
            return e.name;
    return "?";
}

const std::vector<std::string_view>& command_names()
{
    static const std::vector<std::string_view> names = [] {
        std::vector<std::string_view> v;
        for (const auto& e : command_table)
            v.push_back(e.name);
        return v;
    }();
    return names;
}

Command parse_command(std::string_view s)
{
    for (const auto& e : command_table)
        if (e.name == s)
            return e.command;
    std::string list;
    for (auto n : command_names())
        list += (list.empty() ? "" : ", ") + std::string(n);
    throw ValidationError("unknown command '" + std::string(s) + "' (expected one of " + list + ")");
}

SpectralField InitialData::build(std::size_t dim) const
{
    SpectralField u(dim);
    for (const auto& [n, c] : modes) {
        if (n < 1 || n > dim)
            throw ValidationError("initial mode " + std::to_string(n) + " outside 1.." +
                                  std::to_string(dim));
        u(n) += c;
    }
    return u;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

// Reads one JSON object, records every value (defaults included) into the
// canonical tree, and rejects keys nobody asked for.
class Section {
public:
    Section(const json& node, std::string path, ojson& out) : node_(node), path_(std::move(path)), out_(out)
    {
        if (!node_.is_object())
            throw ValidationError(where() + " must be an object");
    }

    std::string key_path(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return node_.contains(std::string(key)); }

    const json* raw(std::string_view key)
    {
        used_.insert(std::string(key));
        const auto it = node_.find(std::string(key));
        return it == node_.end() ? nullptr : &*it;
    }

    double number(std::string_view key, double def)
    {
        const json* v = raw(key);
        double x = def;
        if (v) {
            if (!v->is_number())
                throw ValidationError(key_path(key) + " must be a number");
            x = v->get<double>();
        }
        if (!std::isfinite(x))
            throw ValidationError(key_path(key) + " must be finite");
        out_[std::string(key)] = x;
        return x;
    }

    std::uint64_t unsigned_int(std::string_view key, std::uint64_t def)
    {
        const json* v = raw(key);
        std::uint64_t x = def;
        if (v)
            x = as_unsigned(*v, key_path(key));
        out_[std::string(key)] = x;
        return x;
    }

    int integer(std::string_view key, int def)
    {
        const json* v = raw(key);
        int x = def;
        if (v) {
            if (!v->is_number_integer())
                throw ValidationError(key_path(key) + " must be an integer");
            x = v->get<int>();
        }
        out_[std::string(key)] = x;
        return x;
    }

    bool boolean(std::string_view key, bool def)
    {
        const json* v = raw(key);
        bool x = def;
        if (v) {
            if (!v->is_boolean())
                throw ValidationError(key_path(key) + " must be true or false");
            x = v->get<bool>();
        }
        out_[std::string(key)] = x;
        return x;
    }

    std::string string(std::string_view key, std::string def)
    {
        const json* v = raw(key);
        std::string x = std::move(def);
        if (v) {
            if (!v->is_string())
                throw ValidationError(key_path(key) + " must be a string");
            x = v->get<std::string>();
        }
        out_[std::string(key)] = x;
        return x;
    }

    std::vector<double> numbers(std::string_view key, std::vector<double> def)
    {
        const json* v = raw(key);
        if (v) {
            if (!v->is_array())
                throw ValidationError(key_path(key) + " must be an array of numbers");
            def.clear();
            for (const auto& e : *v) {
                if (!e.is_number() || !std::isfinite(e.get<double>()))
                    throw ValidationError(key_path(key) + " must contain finite numbers");
                def.push_back(e.get<double>());
            }
        }
        out_[std::string(key)] = def;
        return def;
    }

    template <typename U>
    std::vector<U> unsigned_list(std::string_view key, std::vector<U> def)
    {
        const json* v = raw(key);
        if (v) {
            if (!v->is_array())
                throw ValidationError(key_path(key) + " must be an array of integers");
            def.clear();
            for (const auto& e : *v)
                def.push_back(static_cast<U>(as_unsigned(e, key_path(key))));
        }
        out_[std::string(key)] = def;
        return def;
    }

    Section child(std::string_view key, json& storage)
    {
        const json* v = raw(key);
        storage = v ? *v : json::object();
        out_[std::string(key)] = ojson::object();
        return Section(storage, key_path(key), out_[std::string(key)]);
    }

    ojson& out() { return out_; }

    void finish() const
    {
        for (const auto& [k, _] : node_.items())
            if (!used_.count(k))
                throw ValidationError("unknown configuration key '" + key_path(k) + "'");
    }

private:
    std::string where() const { return path_.empty() ? "configuration" : "'" + path_ + "'"; }

    static std::uint64_t as_unsigned(const json& v, const std::string& path)
    {
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() < 0)
                throw ValidationError(path + " must be nonnegative");
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        }
        throw ValidationError(path + " must be a nonnegative integer");
    }

    const json& node_;
    std::string path_;
    ojson& out_;
    std::set<std::string> used_;
};

complex parse_complex(const json& v, const std::string& path)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ValidationError(path + " must be a number or a [re, im] pair");
}

InitialData read_initial(Section& s, std::string_view key)
{
    InitialData data;
    const json* v = s.raw(key);
    ojson canon = ojson::array();
    if (v) {
        if (!v->is_array())
            throw ValidationError(s.key_path(key) + " must be an array of [n, re, im] triples");
        for (const auto& e : *v) {
            if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number() ||
                !e[2].is_number())
                throw ValidationError(s.key_path(key) + " entries must be [n, re, im]");
            const auto n = e[0].get<std::size_t>();
            const complex c{e[1].get<double>(), e[2].get<double>()};
            if (n == 0)
                throw ValidationError(s.key_path(key) + " mode indices start at 1");
            data.modes.emplace_back(n, c);
            canon.push_back({n, c.real(), c.imag()});
        }
    }
    s.out()[std::string(key)] = canon;
    return data;
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ValidationError(message);
}

Scheme parse_scheme(const std::string& s)
{
    if (s == "split-step")
        return Scheme::SplitStepStrang;
    if (s == "picard")
        return Scheme::PicardOracle;
    throw ValidationError("flow.scheme must be 'split-step' or 'picard', got '" + s + "'");
}

RunConfig build(const json& doc, const ConfigOverrides& ov)
{
    RunConfig cfg;
    ojson canon;
    Section top(doc, "", canon);

    const json* cmd = top.raw("command");
    if (!cmd || !cmd->is_string())
        throw ValidationError("configuration needs a string 'command'");
    cfg.command = parse_command(cmd->get<std::string>());
    canon["command"] = cmd->get<std::string>();

    cfg.master_seed = top.unsigned_int("seed", 0);
    if (ov.seed) {
        cfg.master_seed = *ov.seed;
        canon["seed"] = *ov.seed;
    }
    {
        ojson scratch;
        Section exec(doc, "", scratch);
        cfg.workers = static_cast<std::size_t>(exec.unsigned_int("workers", 1));
        cfg.output_dir = exec.string("output_dir", "out");
        top.raw("workers");
        top.raw("output_dir");
    }
    if (ov.workers)
        cfg.workers = *ov.workers;
    if (ov.output_dir)
        cfg.output_dir = *ov.output_dir;
    require(cfg.workers >= 1, "workers must be at least 1");

    cfg.dim = static_cast<std::size_t>(top.unsigned_int("dim", 8));
    require(cfg.dim >= 1, "dim must be at least 1");
    const double q = top.number("q", 3.0);
    require(q > 0.0, "q must be positive");

    // dissipation
    json dstore;
    Section ds = top.child("dissipation", dstore);
    DissipationSpec diss;
    diss.q = q;
    diss.variant = parse_variant(ds.string("variant", std::string(to_string(diss.variant))));
    diss.beta = ds.number("beta", diss.beta);
    diss.xi = parse_gauge(ds.string("gauge", std::string(to_string(diss.xi))));
    diss.delta = ds.number("delta", diss.delta);
    ds.finish();
    diss.validate();

    // noise
    json nstore;
    Section ns = top.child("noise", nstore);
    const double exponent = ns.number("exponent", 2.0);
    NoiseSpec noise = NoiseSpec::power_law(cfg.dim, exponent);
    if (const json* a = ns.raw("amplitudes")) {
        require(a->is_array(), "noise.amplitudes must be an array");
        require(a->size() == cfg.dim, "noise.amplitudes must have exactly dim = " +
                                          std::to_string(cfg.dim) + " entries");
        for (std::size_t i = 0; i < cfg.dim; ++i)
            noise.amplitudes[i] = parse_complex((*a)[i], "noise.amplitudes[" + std::to_string(i) + "]");
    }
    ojson amps = ojson::array();
    for (const auto& c : noise.amplitudes)
        amps.push_back({c.real(), c.imag()});
    ns.out()["amplitudes"] = amps;
    cfg.sde.admissibility_threshold = ns.number("admissibility_threshold", 1e3);
    ns.finish();
    noise.validate();

    // deterministic flow
    json fstore;
    Section fs = top.child("flow", fstore);
    auto& det = cfg.det;
    det.flow.dim = cfg.dim;
    det.flow.q = q;
    det.flow.dt = fs.number("dt", det.flow.dt);
    det.flow.T = fs.number("T", det.flow.T);
    det.flow.scheme = parse_scheme(fs.string("scheme", "split-step"));
    det.flow.picard_tolerance = fs.number("picard_tolerance", det.flow.picard_tolerance);
    det.flow.picard_max_iters = fs.integer("picard_max_iters", det.flow.picard_max_iters);
    det.picard_sobolev = fs.number("picard_sobolev", det.picard_sobolev);
    det.observe_every = static_cast<std::size_t>(fs.unsigned_int("observe_every", det.observe_every));
    det.sobolev_indices = fs.numbers("sobolev_indices", det.sobolev_indices);
    det.check_conservation = fs.boolean("check_conservation", det.check_conservation);
    det.conservation_tolerance = fs.number("conservation_tolerance", det.conservation_tolerance);
    det.initial = read_initial(fs, "initial");
    fs.finish();
    if (det.initial.modes.empty()) {
        det.initial.modes = {{1, complex(0.2)}, {2, complex(0.1)}};
        fs.out()["initial"] = ojson::array({{1, 0.2, 0.0}, {2, 0.1, 0.0}});
    }
    det.flow.validate();
    det.initial.build(cfg.dim);
    require(det.conservation_tolerance > 0.0, "flow.conservation_tolerance must be positive");
    require(det.picard_sobolev > 1.5, "flow.picard_sobolev must exceed 3/2");

    // sde
    json sstore;
    Section ss = top.child("sde", sstore);
    auto& sde = cfg.sde;
    sde.sde.dissipation = diss;
    sde.sde.noise = noise;
    sde.sde.seed = cfg.master_seed;
    sde.sde.alpha = ss.number("alpha", 0.1);
    sde.sde.dt = ss.number("dt", 1e-3);
    sde.sde.T = ss.number("T", 1.0);
    sde.sde.max_halvings = ss.integer("max_halvings", 30);
    sde.trajectories = static_cast<std::size_t>(ss.unsigned_int("trajectories", sde.trajectories));
    sde.observe_every = static_cast<std::size_t>(ss.unsigned_int("observe_every", sde.observe_every));
    sde.initial = read_initial(ss, "initial");
    ss.finish();
    sde.sde.validate();
    sde.initial.build(cfg.dim);
    require(sde.trajectories >= 1, "sde.trajectories must be at least 1");
    require(sde.observe_every >= 1, "sde.observe_every must be at least 1");

    // stationary
    json ststore;
    Section st = top.child("stationary", ststore);
    auto& so = cfg.stationary.options;
    so.burn_in = st.number("burn_in", so.burn_in);
    so.horizon = st.number("horizon", so.horizon);
    so.trajectories = static_cast<std::size_t>(st.unsigned_int("trajectories", so.trajectories));
    so.sample_every = static_cast<std::size_t>(st.unsigned_int("sample_every", so.sample_every));
    so.layout.bins = static_cast<std::size_t>(st.unsigned_int("bins", so.layout.bins));
    cfg.stationary.tail_points =
        static_cast<std::size_t>(st.unsigned_int("tail_points", cfg.stationary.tail_points));
    cfg.stationary.tail_decades = st.number("tail_decades", cfg.stationary.tail_decades);
    st.finish();
    so.workers = cfg.workers;
    require(so.burn_in >= 0.0 && so.burn_in < so.horizon,
            "stationary needs 0 <= burn_in < horizon");
    require(so.trajectories >= 1, "stationary.trajectories must be at least 1");
    require(so.sample_every >= 1, "stationary.sample_every must be at least 1");
    require(so.layout.bins >= 1, "stationary.bins must be at least 1");
    require(cfg.stationary.tail_points >= 2, "stationary.tail_points must be at least 2");
    require(cfg.stationary.tail_decades > 0.0, "stationary.tail_decades must be positive");

    // sweep
    json swstore;
    Section sw = top.child("sweep", swstore);
    cfg.sweep.alphas = sw.numbers("alphas", cfg.sweep.alphas);
    cfg.sweep.scale_horizon = sw.boolean("scale_horizon", cfg.sweep.scale_horizon);
    sw.finish();
    require(!cfg.sweep.alphas.empty(), "sweep.alphas must not be empty");
    for (std::size_t i = 0; i < cfg.sweep.alphas.size(); ++i) {
        require(cfg.sweep.alphas[i] > 0.0 && cfg.sweep.alphas[i] < 1.0,
                "sweep.alphas must lie in (0, 1)");
        require(i == 0 || cfg.sweep.alphas[i] <= cfg.sweep.alphas[i - 1],
                "sweep.alphas must be nonincreasing");
    }

    // growth
    json gstore;
    Section gs = top.child("growth", gstore);
    auto& gr = cfg.growth;
    gr.flow.dim = cfg.dim;
    gr.flow.q = q;
    gr.flow.T = gs.number("T", 100.0);
    gr.flow.dt = gs.number("dt", 1e-3);
    gr.samples = static_cast<std::size_t>(gs.unsigned_int("samples", gr.samples));
    gr.sigma = gs.number("sigma", diss.beta - diss.delta);
    gr.xi = parse_gauge(gs.string("gauge", std::string(to_string(gr.xi))));
    gr.observe_every = static_cast<std::size_t>(gs.unsigned_int("observe_every", gr.observe_every));
    gr.checkpoint = gs.string("checkpoint", "");
    if (const json* off = gs.raw("offset"); off && !off->is_null()) {
        require(off->is_number_integer() && off->get<int>() >= 0,
                "growth.offset must be a nonnegative integer or null");
        gr.offset = off->get<int>();
    }
    gs.out()["offset"] = gr.offset ? ojson(*gr.offset) : ojson(nullptr);
    gs.finish();
    gr.flow.validate();
    require(gr.samples >= 1, "growth.samples must be at least 1");
    require(gr.sigma >= 0.0, "growth.sigma must be nonnegative");
    require(gr.observe_every >= 1, "growth.observe_every must be at least 1");

    // counting
    json cstore;
    Section cs = top.child("counting", cstore);
    auto& cn = cfg.counting;
    cn.ladder = cs.unsigned_list("ladder", cn.ladder);
    cn.oracle_max_M = cs.unsigned_int("oracle_max_M", cn.oracle_max_M);
    cn.oracle_N = cs.unsigned_int("oracle_N", cn.oracle_N);
    cn.lambda_ladder = cs.unsigned_list("lambda_ladder", cn.lambda_ladder);
    cs.finish();
    require(cn.ladder.size() >= 2, "counting.ladder needs at least two entries");
    for (auto n : cn.ladder)
        require(n >= 1 && n <= (1u << 14), "counting.ladder entries must lie in 1..16384");
    for (auto n : cn.lambda_ladder)
        require(n >= 1, "counting.lambda_ladder entries must be positive");
    require(cn.oracle_N >= 1, "counting.oracle_N must be at least 1");

    // eigenfunction norms
    json estore;
    Section es = top.child("eigen_norms", estore);
    auto& en = cfg.eigen_norms;
    en.p = es.numbers("p", en.p);
    en.ladder = es.unsigned_list("ladder", en.ladder);
    en.resolution = static_cast<std::size_t>(es.unsigned_int("resolution", en.resolution));
    es.finish();
    for (double p : en.p)
        require(p >= 1.0, "eigen_norms.p entries must be >= 1");
    require(en.ladder.size() >= 2, "eigen_norms.ladder needs at least two entries");
    for (auto n : en.ladder)
        require(n >= 1, "eigen_norms.ladder entries must be positive");

    // product norms
    json pstore;
    Section ps = top.child("product_norms", pstore);
    auto& pn = cfg.product_norms;
    pn.m = ps.integer("m", pn.m);
    pn.ladder = ps.unsigned_list("ladder", pn.ladder);
    pn.resolution = static_cast<std::size_t>(ps.unsigned_int("resolution", pn.resolution));
    ps.finish();
    require(pn.m >= 2, "product_norms.m must be at least 2");
    require(pn.ladder.size() >= 2, "product_norms.ladder needs at least two entries");
    for (auto n : pn.ladder)
        require(n >= 1, "product_norms.ladder entries must be positive");

    // multilinear
    json mstore;
    Section ms = top.child("multilinear", mstore);
    auto& ml = cfg.multilinear;
    ml.m = ms.integer("m", ml.m);
    ml.ladder = ms.unsigned_list("ladder", ml.ladder);
    ml.draws = static_cast<std::size_t>(ms.unsigned_int("draws", ml.draws));
    ml.time_factor = static_cast<std::size_t>(ms.unsigned_int("time_factor", ml.time_factor));
    ml.derivative = ms.boolean("derivative", ml.derivative);
    ms.finish();
    require(ml.m >= 2, "multilinear.m must be at least 2");
    require(ml.ladder.size() >= 2, "multilinear.ladder needs at least two entries");
    for (auto n : ml.ladder)
        require(n >= 1, "multilinear.ladder entries must be positive");
    require(ml.draws >= 1, "multilinear.draws must be at least 1");
    require(ml.time_factor >= 1, "multilinear.time_factor must be at least 1");

    // radial Sobolev
    json rstore;
    Section rs = top.child("radial_sobolev", rstore);
    cfg.radial_sobolev.samples =
        static_cast<std::size_t>(rs.unsigned_int("samples", cfg.radial_sobolev.samples));
    cfg.radial_sobolev.dim = static_cast<std::size_t>(rs.unsigned_int("dim", cfg.radial_sobolev.dim));
    rs.finish();
    require(cfg.radial_sobolev.samples >= 1, "radial_sobolev.samples must be at least 1");
    require(cfg.radial_sobolev.dim >= 1, "radial_sobolev.dim must be at least 1");

    top.finish();
    cfg.canonical = std::move(canon);
    cfg.hash = fnv1a64(cfg.canonical.dump());
    return cfg;
}

std::string position(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is one past the offending character.
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        std::string what = e.what();
        const auto colon = what.rfind(": ");
        throw ValidationError("configuration parse error at " + position(text, at) + ": " +
                              (colon == std::string::npos ? what : what.substr(colon + 2)));
    }
    if (!doc.is_object())
        throw ValidationError("configuration must be a JSON object");
    return build(doc, overrides);
}

RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ValidationError("cannot read configuration file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str(), overrides);
}

} // namespace nlsball
