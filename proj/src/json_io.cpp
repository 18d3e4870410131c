#include "cremona/json_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace cremona {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(where + ": unknown field '" + it.key() + "'");
}

Int get_int(const Json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ValidationError(where + ": missing integer field '" + key + "'");
    return j[key].get<Int>();
}

} // namespace

AnySystem parse_system(const Json& j) {
    reject_unknown(j, {"format", "kind", "surface", "degree", "class", "points", "collinear",
                       "irreducible", "role"},
                   "system");
    if (!j.contains("format") || j["format"] != 1)
        throw ValidationError("system: missing or unsupported format (expected 1)");
    if (!j.contains("surface")) throw ValidationError("system: missing surface");
    reject_unknown(j["surface"], {"type", "n"}, "surface");
    std::string type = j["surface"].value("type", "");

    Cluster cluster;
    MultiplicityVector mult;
    if (j.contains("points")) {
        if (!j["points"].is_array()) throw ValidationError("points: expected an array");
        for (const auto& pj : j["points"]) {
            reject_unknown(pj, {"id", "mult", "predecessor", "proximate", "flags"}, "point");
            PointNode n;
            if (!pj.contains("id") || !pj["id"].is_string())
                throw ValidationError("point: missing string id");
            n.id = pj["id"].get<std::string>();
            if (pj.contains("predecessor")) n.predecessor = pj["predecessor"].get<std::string>();
            if (pj.contains("proximate"))
                for (const auto& t : pj["proximate"]) n.proximate_to.push_back(t.get<std::string>());
            if (n.predecessor && n.proximate_to.empty()) n.proximate_to = {*n.predecessor};
            if (pj.contains("flags")) {
                reject_unknown(pj["flags"], {"on_E", "fiber", "on_fiber_strict", "general"}, "flags");
                n.flags.on_E = pj["flags"].value("on_E", false);
                n.flags.on_fiber_strict = pj["flags"].value("on_fiber_strict", false);
                n.flags.general = pj["flags"].value("general", false);
                if (pj["flags"].contains("fiber"))
                    n.flags.fiber = pj["flags"]["fiber"].get<std::string>();
            }
            cluster.nodes.push_back(n);
            mult[n.id] = pj.value("mult", Int{0});
        }
    }
    if (j.contains("collinear"))
        for (const auto& gj : j["collinear"]) {
            std::vector<PointId> g;
            for (const auto& x : gj) g.push_back(x.get<std::string>());
            cluster.collinear.push_back(g);
        }

    SystemKind kind = SystemKind::Curve;
    if (j.contains("kind")) {
        std::string k = j["kind"].get<std::string>();
        if (k == "curve") kind = SystemKind::Curve;
        else if (k == "system") kind = SystemKind::System;
        else throw ValidationError("system: kind must be 'curve' or 'system'");
    }
    bool irreducible = j.value("irreducible", true);

    // Structural cluster validity is checked per command (the `validate`
    // command reports violations as data instead of failing).
    if (type == "P2") {
        PlaneSystem s;
        s.degree = get_int(j, "degree", "system");
        s.cluster = cluster;
        s.mult = mult;
        s.kind = kind;
        s.irreducible = irreducible;
        return s;
    }
    if (type == "Fn") {
        HirzebruchSystem s;
        s.n = get_int(j["surface"], "n", "surface");
        if (!j.contains("class")) throw ValidationError("system: Fn input needs a class {k,h}");
        reject_unknown(j["class"], {"k", "h"}, "class");
        s.k = get_int(j["class"], "k", "class");
        s.h = get_int(j["class"], "h", "class");
        s.cluster = cluster;
        s.mult = mult;
        s.kind = kind;
        s.irreducible = irreducible;
        return s;
    }
    throw ValidationError("system: surface type must be 'P2' or 'Fn'");
}

AnySystem parse_system_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("JSON parse error: ") + e.what());
    }
    return parse_system(j);
}

namespace {

Json cluster_points_json(const Cluster& c, const MultiplicityVector& m) {
    Json pts = Json::array();
    for (const auto& n : c.nodes) {
        Json pj;
        pj["id"] = n.id;
        pj["mult"] = m.count(n.id) ? m.at(n.id) : 0;
        if (n.predecessor) pj["predecessor"] = *n.predecessor;
        if (!n.proximate_to.empty()) pj["proximate"] = n.proximate_to;
        Json flags = Json::object();
        if (n.flags.on_E) flags["on_E"] = true;
        if (n.flags.on_fiber_strict) flags["on_fiber_strict"] = true;
        if (n.flags.general) flags["general"] = true;
        if (n.flags.fiber) flags["fiber"] = *n.flags.fiber;
        if (!flags.empty()) pj["flags"] = flags;
        pts.push_back(pj);
    }
    return pts;
}

} // namespace

Json system_to_json(const PlaneSystem& s) {
    Json j;
    j["format"] = 1;
    j["kind"] = s.kind == SystemKind::Curve ? "curve" : "system";
    j["surface"] = Json{{"type", "P2"}};
    j["degree"] = s.degree;
    j["points"] = cluster_points_json(s.cluster, s.mult);
    if (!s.cluster.collinear.empty()) j["collinear"] = s.cluster.collinear;
    j["irreducible"] = s.irreducible;
    if (s.degenerate) j["degenerate"] = true;
    return j;
}

Json system_to_json(const HirzebruchSystem& s) {
    Json j;
    j["format"] = 1;
    j["kind"] = s.kind == SystemKind::Curve ? "curve" : "system";
    j["surface"] = Json{{"type", "Fn"}, {"n", s.n}};
    j["class"] = Json{{"k", s.k}, {"h", s.h}};
    j["points"] = cluster_points_json(s.cluster, s.mult);
    if (!s.cluster.collinear.empty()) j["collinear"] = s.cluster.collinear;
    j["irreducible"] = s.irreducible;
    if (s.degenerate) j["degenerate"] = true;
    return j;
}

Json system_to_json(const AnySystem& s) {
    return std::visit([](const auto& x) { return system_to_json(x); }, s);
}

// ---------------------------------------------------------------------------
// Classical notation
// ---------------------------------------------------------------------------

namespace {

std::string compress(const std::vector<Int>& mults) {
    std::string out;
    size_t i = 0;
    while (i < mults.size()) {
        size_t j = i;
        while (j < mults.size() && mults[j] == mults[i]) ++j;
        if (!out.empty()) out += ",";
        out += std::to_string(mults[i]);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

// One entry per proper root: (m,[prox-children...]) with the rest of the
// subtree emitted as separate entries.
struct Entry {
    Int mult;
    std::string text;
};

void render_cluster_entries(const Cluster& c, const MultiplicityVector& mv,
                            const std::function<bool(const PointNode&)>& take_root,
                            std::vector<Entry>& out) {
    auto mult_of = [&](const PointId& id) { return mv.count(id) ? mv.at(id) : 0; };
    // One compound entry per proper point listing everything proximate to it;
    // the remaining subtree members appear as flat entries.
    for (const auto& n : c.nodes) {
        if (n.predecessor || !take_root(n)) continue;
        std::vector<Int> prox_mults;
        std::vector<Int> rest;
        std::function<void(const PointId&)> scan = [&](const PointId& id) {
            for (const auto& ch : c.children_of(id)) {
                const PointNode& chn = c.at(ch);
                bool prox_root = std::find(chn.proximate_to.begin(), chn.proximate_to.end(),
                                           n.id) != chn.proximate_to.end();
                if (prox_root)
                    prox_mults.push_back(mult_of(ch));
                else
                    rest.push_back(mult_of(ch));
                scan(ch);
            }
        };
        scan(n.id);
        Entry e;
        e.mult = mult_of(n.id);
        if (prox_mults.empty()) {
            e.text = std::to_string(e.mult);
        } else {
            std::sort(prox_mults.begin(), prox_mults.end(), std::greater<>());
            e.text = "(" + std::to_string(e.mult) + ",[" + compress(prox_mults) + "])";
        }
        out.push_back(e);
        for (Int r : rest) out.push_back(Entry{r, std::to_string(r)});
    }
}

std::string join_entries(std::vector<Entry> entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.mult > b.mult; });
    std::string out;
    size_t i = 0;
    while (i < entries.size()) {
        if (entries[i].mult == 0 && entries[i].text == "0") {
            ++i;
            continue;
        }
        size_t j = i;
        bool simple = entries[i].text.find('(') == std::string::npos;
        while (simple && j < entries.size() && entries[j].text == entries[i].text) ++j;
        if (!out.empty()) out += ",";
        out += entries[i].text;
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = std::max(j, i + 1);
    }
    return out;
}

} // namespace

std::string render_system(const PlaneSystem& s) {
    std::vector<Entry> entries;
    render_cluster_entries(s.cluster, s.mult, [](const PointNode&) { return true; }, entries);
    std::string pts = join_entries(entries);
    std::string out = "L(" + std::to_string(s.degree);
    if (!pts.empty()) out += ";" + pts;
    return out + ")";
}

std::string render_system(const HirzebruchSystem& s) {
    std::vector<Entry> on_e, off_e;
    render_cluster_entries(s.cluster, s.mult, [](const PointNode& n) { return n.flags.on_E; }, on_e);
    render_cluster_entries(s.cluster, s.mult, [](const PointNode& n) { return !n.flags.on_E; },
                           off_e);
    std::string out = "L_" + std::to_string(s.n) + "(" + std::to_string(s.k) + "," +
                      std::to_string(s.h);
    std::string one = join_entries(on_e);
    std::string two = join_entries(off_e);
    if (!one.empty() || !two.empty()) {
        out += ";";
        if (!one.empty()) out += "[" + one + "]";
        if (!one.empty() && !two.empty()) out += ",";
        out += two;
    }
    return out + ")";
}

std::string render_system(const AnySystem& s) {
    return std::visit([](const auto& x) { return render_system(x); }, s);
}

Json classification_to_json(const ClassificationResult& c) {
    Json j;
    j["case"] = to_string(c.c);
    j["m"] = c.m;
    j["alpha"] = c.alpha;
    if (c.c == PairCase::DP2 || c.c == PairCase::R || c.c == PairCase::B2) j["n"] = c.n;
    j["model"] = system_to_json(c.model);
    j["model_notation"] = render_system(c.model);
    if (!c.uniqueness_caveat.empty()) j["uniqueness_caveat"] = c.uniqueness_caveat;
    j["generic_position"] = "assumed";
    return j;
}

Json minimization_to_json(const MinimizationResult& m) {
    Json j;
    j["classification"] = classification_to_json(m.classification);
    Json models = Json::array();
    for (const auto& mm : m.models) {
        Json mj;
        mj["type_tag"] = mm.type_tag;
        mj["system"] = system_to_json(mm.system);
        mj["notation"] = render_system(mm.system);
        mj["minimality"] = mm.minimality;
        if (!mm.caveat.empty()) mj["ambiguity"] = mm.caveat;
        models.push_back(mj);
    }
    j["models"] = models;
    return j;
}

Json factorization_to_json(const Factorization& f) {
    Json j;
    Json steps = Json::array();
    for (const auto& st : f.steps) {
        Json sj;
        Json centers = Json::array();
        for (const auto& c : st.centers) {
            if (c.kind == CenterSpec::Kind::Existing)
                centers.push_back(c.id);
            else
                centers.push_back("@general");
        }
        sj["centers"] = centers;
        sj["aux_general"] = st.aux_general;
        steps.push_back(sj);
    }
    j["steps"] = steps;
    Json cert = Json::array();
    for (const auto& s : f.certificate) cert.push_back(Json::array({s.k, s.h, s.s}));
    j["certificate"] = cert;
    return j;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

struct CliOptions {
    std::string command;
    std::string input_path; // empty = stdin
    std::string format = "json";
    Int m = 1;
    int depth = 3;
    int aux = 2;
    bool aux_surface = false;
    bool trace_lattice = false;
    std::string batch_dir;
};

std::string read_input(const CliOptions& opt) {
    if (opt.input_path.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(opt.input_path);
    if (!f) throw ValidationError("cannot open input file '" + opt.input_path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json lattice_trace(const AnySystem& s) {
    Json j;
    BlowupLattice lat = std::visit([](const auto& x) { return lattice_of(x); }, s);
    DivisorClass D = std::visit([](const auto& x) { return class_of(x); }, s);
    j["class"] = D.c;
    j["self_intersection"] = intersect(lat, D, D);
    j["genus"] = genus(lat, D);
    Json exc = Json::array();
    for (const auto& e : strict_exceptional_classes(lat)) exc.push_back(e.c);
    j["strict_exceptionals"] = exc;
    return j;
}

int run_one(const CliOptions& opt, const std::string& text, std::ostream& out) {
    AnySystem sys = parse_system_text(text);
    const std::string& cmd = opt.command;
    Json report;

    if (cmd != "validate")
        std::visit([](const auto& x) { require_valid(x, "input"); }, sys);

    if (cmd == "validate") {
        const Cluster& cl = std::visit([](const auto& x) -> const Cluster& { return x.cluster; }, sys);
        auto violations = validate_cluster(cl);
        Json v = Json::array();
        for (const auto& viol : violations) v.push_back(Json{{"id", viol.id}, {"rule", viol.rule}});
        report["violations"] = v;
        report["valid"] = violations.empty();
        report["notation"] = render_system(sys);
        if (opt.format == "text")
            out << (violations.empty() ? "valid: " : "invalid: ") << render_system(sys) << "\n";
        else
            out << report.dump(2) << "\n";
        return violations.empty() ? 0 : 2;
    }
    if (cmd == "adjoint") {
        auto a = adjoint(sys, opt.m);
        if (!a) {
            report["empty"] = true;
        } else {
            report["empty"] = false;
            report["system"] = system_to_json(*a);
            report["notation"] = render_system(*a);
            report["virtual_dimension"] = virtual_dimension(*a);
            report["generic_position"] = "assumed";
            if (opt.trace_lattice) report["lattice"] = lattice_trace(*a);
        }
        if (opt.format == "text")
            out << (a ? render_system(*a) : std::string("empty")) << "\n";
        else
            out << report.dump(2) << "\n";
        return 0;
    }
    if (cmd == "classify") {
        auto c = classify(sys);
        report = classification_to_json(c);
        if (opt.trace_lattice) report["lattice"] = lattice_trace(sys);
        if (opt.format == "text")
            out << to_string(c.c) << " m=" << c.m << " alpha=" << c.alpha << " model "
                << render_system(c.model) << "\n";
        else
            out << report.dump(2) << "\n";
        return 0;
    }
    if (cmd == "minimize") {
        auto m = minimal_models(sys);
        report = minimization_to_json(m);
        if (opt.format == "text") {
            out << to_string(m.classification.c) << " m=" << m.classification.m
                << " alpha=" << m.classification.alpha << "\n";
            for (const auto& mm : m.models)
                out << mm.type_tag << ": " << render_system(mm.system) << " [" << mm.minimality
                    << "]\n";
        } else {
            out << report.dump(2) << "\n";
        }
        return 0;
    }
    if (cmd == "factor") {
        const auto* net = std::get_if<PlaneSystem>(&sys);
        if (!net) throw ValidationError("factor: input must be a plane net");
        auto f = nc_factor(*net);
        report = factorization_to_json(f);
        if (opt.format == "text") {
            out << f.steps.size() << " quadratic steps\n";
            for (const auto& s : f.certificate)
                out << "(" << s.k << "," << s.h << "," << s.s << ")\n";
        } else {
            out << report.dump(2) << "\n";
        }
        return 0;
    }
    if (cmd == "forest" || cmd == "sharp" || cmd == "flat" || cmd == "natural") {
        const auto* hs = std::get_if<HirzebruchSystem>(&sys);
        if (!hs) throw ValidationError(cmd + ": input must be a Hirzebruch system");
        if (cmd == "forest") {
            auto [nat, st] = natural_model(*hs);
            auto forest = build_forest(nat);
            if (opt.format == "dot") {
                out << forest_to_dot(forest);
            } else {
                auto clusters = good_clusters(forest, nat.n);
                Json cj = Json::array();
                for (const auto& gc : clusters)
                    cj.push_back(Json{{"sequence", gc.sequence}, {"weight", gc.weight}});
                report["natural_model"] = system_to_json(nat);
                report["good_clusters"] = cj;
                report["dot"] = forest_to_dot(forest);
                out << report.dump(2) << "\n";
            }
            return 0;
        }
        auto [model, st] = cmd == "sharp"   ? sharp_model(*hs)
                           : cmd == "flat"  ? flat_model(*hs)
                                            : natural_model(*hs);
        report["system"] = system_to_json(model);
        report["notation"] = render_system(model);
        report["status"] = Json{{"sharp", st.sharp},
                                {"sharpsharp", st.sharpsharp},
                                {"natural", st.natural},
                                {"flat_index", st.flat_index}};
        if (opt.format == "text")
            out << render_system(model) << "\n";
        else
            out << report.dump(2) << "\n";
        return 0;
    }
    if (cmd == "reduce") {
        const auto* ps = std::get_if<PlaneSystem>(&sys);
        if (!ps) throw ValidationError("reduce: input must be a plane system");
        auto r = dejonquieres_reduction(*ps);
        report["best_degree"] = r.best_degree;
        report["net"] = system_to_json(r.net);
        report["net_notation"] = render_system(r.net);
        report["image"] = system_to_json(r.image);
        report["image_notation"] = render_system(r.image);
        if (opt.format == "text")
            out << "best degree " << r.best_degree << " via " << render_system(r.net) << "\n";
        else
            out << report.dump(2) << "\n";
        return 0;
    }
    if (cmd == "oracle") {
        const auto* ps = std::get_if<PlaneSystem>(&sys);
        if (!ps) throw ValidationError("oracle: input must be a plane system");
        auto r = brute_force_min_oracle(*ps, opt.depth, opt.aux, !opt.aux_surface);
        report["min_degree"] = r.degree;
        report["complete"] = r.complete;
        if (opt.format == "text")
            out << r.degree << (r.complete ? "" : " (partial)") << "\n";
        else
            out << report.dump(2) << "\n";
        return 0;
    }
    throw ValidationError("unknown command '" + cmd + "'");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliOptions opt;
    try {
        std::vector<std::string> rest;
        for (size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            auto need_value = [&](const char* flag) -> std::string {
                if (i + 1 >= args.size())
                    throw ValidationError(std::string(flag) + " requires a value");
                return args[++i];
            };
            if (a == "--format") opt.format = need_value("--format");
            else if (a == "--m") opt.m = std::stoll(need_value("--m"));
            else if (a == "--depth") opt.depth = std::stoi(need_value("--depth"));
            else if (a == "--aux") opt.aux = std::stoi(need_value("--aux"));
            else if (a == "--aux-surface") opt.aux_surface = true;
            else if (a == "--trace-lattice") opt.trace_lattice = true;
            else if (a == "--assume-generic") { /* default */ }
            else if (a == "--batch") opt.batch_dir = need_value("--batch");
            else if (!a.empty() && a[0] == '-') throw ValidationError("unknown flag '" + a + "'");
            else rest.push_back(a);
        }
        if (rest.empty()) throw ValidationError("usage: cremona <command> [options] [input.json]");
        opt.command = rest[0];
        if (rest.size() > 2) throw ValidationError("exactly one input per invocation");
        if (rest.size() == 2) opt.input_path = rest[1];
        if (opt.format != "json" && opt.format != "text" && opt.format != "dot")
            throw ValidationError("--format must be json, text or dot");

        if (!opt.batch_dir.empty()) {
            namespace fs = std::filesystem;
            std::vector<std::string> files;
            for (const auto& e : fs::directory_iterator(opt.batch_dir))
                if (e.path().extension() == ".json") files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            int worst = 0;
            for (const auto& f : files) {
                out << "== " << f << "\n";
                CliOptions o = opt;
                o.input_path = f;
                o.batch_dir.clear();
                try {
                    worst = std::max(worst, run_one(o, read_input(o), out));
                } catch (const ValidationError& e) {
                    err << "error: " << e.what() << "\n";
                    worst = std::max(worst, 2);
                }
            }
            return worst;
        }
        return run_one(opt, read_input(opt), out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace cremona
