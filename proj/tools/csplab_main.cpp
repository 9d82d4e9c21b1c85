// csplab command line: structure validation, homomorphism and consistency
// queries, the power-set structure, polymorphism tests, the tree-fragment
// constructions, and the exact rotation-group tools.
//
// Output is JSON by default (byte-stable across runs); --text switches the
// structure-producing commands to the .struct DSL and everything else to
// plain lines. Exit codes: 0 = definite answer, 1 = usage/parse error,
// 2 = size-guard refusal (JSON carries a "guard" field).

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "csplab/btlab.hpp"
#include "csplab/core.hpp"
#include "csplab/dsl.hpp"
#include "csplab/polywidth.hpp"
#include "csplab/so3.hpp"
#include "csplab/solver.hpp"
#include "csplab/structure.hpp"
#include "csplab/word.hpp"

using json = nlohmann::ordered_json;
using namespace csplab;

namespace {

struct Options {
    Limits limits;
    bool text = false;
    std::uint64_t seed = 1;
    int threads = 1; // accepted for interface stability; execution is sequential
    int b_override = -1;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Structure load_structure(const std::string& path) {
    try {
        return parse_structure(read_file(path));
    } catch (const parse_error& e) {
        throw std::runtime_error(path + ":" + e.what());
    }
}

void apply_config_file(const std::string& path, Options& opt) {
    std::istringstream in(read_file(path));
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        auto num = [&] {
            return static_cast<std::size_t>(std::stoull(val));
        };
        if (key == "max_power")
            opt.limits.max_power = num();
        else if (key == "max_u")
            opt.limits.max_u_universe = num();
        else if (key == "max_fragment")
            opt.limits.max_fragment = num();
        else if (key == "max_dset")
            opt.limits.max_dset = num();
        else if (key == "max_pool")
            opt.limits.max_pool = num();
        else if (key == "seed")
            opt.seed = std::stoull(val);
        else if (key == "output")
            opt.text = (val == "text");
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown key: " + key);
    }
}

json structure_json(const Structure& s) {
    json j;
    j["name"] = s.name;
    j["universe"] = s.universe;
    j["relations"] = json::array();
    for (const auto& r : s.relations) {
        json jr;
        jr["name"] = r.name;
        jr["arity"] = r.arity;
        jr["tuples"] = json::array();
        for (const auto& t : r.tuples) {
            json row = json::array();
            for (int e : t) row.push_back(s.universe[e]);
            jr["tuples"].push_back(row);
        }
        j["relations"].push_back(jr);
    }
    return j;
}

json hom_json(const Structure& src, const Structure& dst, const Hom& h) {
    json j = json::object();
    for (std::size_t i = 0; i < h.map.size(); ++i)
        j[src.universe[i]] = dst.universe[h.map[i]];
    return j;
}

json lists_json(const Structure& b, const Structure& a, const ListAssignment& la) {
    json j = json::object();
    for (std::size_t i = 0; i < la.lists.size(); ++i) {
        json vals = json::array();
        for (int v : la.values(static_cast<int>(i))) vals.push_back(a.universe[v]);
        j[b.universe[i]] = vals;
    }
    return j;
}

void emit(const Options& opt, const json& j) {
    if (opt.text) {
        for (auto it = j.begin(); it != j.end(); ++it)
            std::cout << it.key() << " = " << it.value().dump() << "\n";
    } else {
        std::cout << j.dump() << "\n";
    }
}

void emit_structure(const Options& opt, const Structure& s) {
    if (opt.text)
        std::cout << serialize_structure(s);
    else
        std::cout << structure_json(s).dump() << "\n";
}

// ---- selfcheck ----

Structure random_structure(std::mt19937_64& rng, int max_n) {
    std::uniform_int_distribution<int> nd(1, max_n);
    int n = nd(rng);
    Structure s;
    s.name = "R";
    for (int i = 0; i < n; ++i) s.universe.push_back("x" + std::to_string(i));
    Relation e;
    e.name = "E";
    e.arity = 2;
    std::uniform_int_distribution<int> coin(0, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (coin(rng) == 0) e.tuples.push_back({i, j});
    s.relations.push_back(e);
    s.normalize();
    return s;
}

int run_selfcheck(const Options& opt) {
    std::mt19937_64 rng(opt.seed);
    auto t2 = make_structure("T2", {"s", "t"}, {{"E", 2, {{"s", "t"}}}});
    auto k2 = make_structure("K2", {"0", "1"}, {{"E", 2, {{"0", "1"}, {"1", "0"}}}});
    auto k3 = make_structure(
        "K3", {"0", "1", "2"},
        {{"E", 2, {{"0", "1"}, {"1", "0"}, {"0", "2"}, {"2", "0"}, {"1", "2"}, {"2", "1"}}}});
    const Structure templates[] = {t2, k2, k3};
    int checks = 0;
    auto expect = [&](bool ok, const std::string& what) {
        ++checks;
        if (!ok) throw std::logic_error("selfcheck failed: " + what);
    };

    for (int iter = 0; iter < 60; ++iter) {
        Structure b = random_structure(rng, 4);
        const Structure& a = templates[iter % 3];
        auto ac = ac_lists(b, a, opt.limits);
        auto h = solve_hom(b, a, opt.limits);
        if (!ac) expect(!h, "AC refutation with an existing homomorphism");
        if (h) expect(is_hom(b, a, *h), "unverified solver witness");
        if (ac) {
            auto uh = lists_to_u_hom(*ac);
            expect(is_hom(b, u_structure(a, opt.limits), uh), "AC lists not a U-homomorphism");
        }
        expect(parse_structure(serialize_structure(b)) == b, "serialization roundtrip");
        Structure q = quotient(b, gaifman_components(b));
        expect(q.n_elements() <= b.n_elements(), "component quotient grew");
        ++checks;
    }
    {
        auto sys = gen_matrices(2);
        std::uniform_int_distribution<int> letter(1, 4);
        for (int iter = 0; iter < 20; ++iter) {
            Word g, w;
            for (int i = 0; i < 4; ++i) {
                int x = letter(rng);
                g.push_back(rng() % 2 ? x : -x);
                x = letter(rng);
                w.push_back(rng() % 2 ? x : -x);
            }
            Mat3 mg = word_matrix(sys, reduce(g)), mw = word_matrix(sys, reduce(w));
            expect(mw.is_rotation(), "word matrix not a rotation");
            expect(delta_sq(mg * mw * mg.transpose()) == delta_sq(mw),
                   "delta_sq not conjugation invariant");
        }
    }
    json out;
    out["ok"] = true;
    out["seed"] = opt.seed;
    out["checks"] = checks;
    emit(opt, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite relational structures: consistency, width-1, tree fragments, "
                 "and exact rotations"};
    app.require_subcommand(1);

    Options opt;
    std::string config_path;
    bool json_flag = false;
    app.add_option("--config", config_path, "configuration file (key=value lines)");
    app.add_flag("--text", opt.text, "plain-text / DSL output");
    app.add_flag("--json", json_flag, "JSON output (default)");
    app.add_option("--max-power", opt.limits.max_power, "power/tuple size guard");
    app.add_option("--max-u", opt.limits.max_u_universe, "template size guard for U(A)");
    app.add_option("--max-fragment", opt.limits.max_fragment, "fragment vertex guard");
    app.add_option("--max-dset", opt.limits.max_dset, "distinct-product set guard");
    app.add_option("--max-pool", opt.limits.max_pool, "search pool guard");
    app.add_option("--seed", opt.seed, "random seed for selfcheck");
    app.add_option("--threads", opt.threads, "worker threads (output-invariant)");

    std::string file_a, file_b, poly_kind = "cyclic", word_text, d_text;
    int poly_n = 2, radius = 2, depth = 3, root_rank = 0;
    std::string target_text = "0/1";

    auto* c_validate = app.add_subcommand("validate", "check structure invariants");
    c_validate->add_option("file", file_a, "structure file")->required();

    auto* c_hom = app.add_subcommand("hom", "search a homomorphism B -> A");
    c_hom->add_option("input", file_b, "input structure B")->required();
    c_hom->add_option("template", file_a, "template structure A")->required();

    auto* c_ac = app.add_subcommand("ac", "arc-consistency lists for B over A");
    c_ac->add_option("input", file_b, "input structure B")->required();
    c_ac->add_option("template", file_a, "template structure A")->required();

    auto* c_homlists = app.add_subcommand("homlists", "achievable values per element");
    c_homlists->add_option("input", file_b, "input structure B")->required();
    c_homlists->add_option("template", file_a, "template structure A")->required();

    auto* c_u = app.add_subcommand("u", "power-set structure U(A)");
    c_u->add_option("template", file_a, "template structure A")->required();

    auto* c_width1 = app.add_subcommand("width1", "width-1 witness U(A) -> A");
    c_width1->add_option("template", file_a, "template structure A")->required();

    auto* c_poly = app.add_subcommand("poly", "polymorphism search");
    c_poly->add_option("--kind", poly_kind, "cyclic|ts")
        ->check(CLI::IsMember({"cyclic", "ts"}));
    c_poly->add_option("-n", poly_n, "arity")->required();
    c_poly->add_option("template", file_a, "template structure A")->required();

    auto* c_bt = app.add_subcommand("bt", "tree-fragment constructions");
    c_bt->require_subcommand(1);
    auto* c_bt_b = c_bt->add_subcommand("b", "generator count");
    c_bt_b->add_option("template", file_a, "template structure A")->required();
    auto* c_bt_fragment = c_bt->add_subcommand("fragment", "ball fragment");
    c_bt_fragment->add_option("template", file_a, "template structure A")->required();
    c_bt_fragment->add_option("--radius", radius, "ball radius");
    auto* c_bt_treehom = c_bt->add_subcommand("treehom", "extend a homomorphism over the fragment");
    c_bt_treehom->add_option("template", file_a, "template structure A")->required();
    c_bt_treehom->add_option("--radius", radius, "ball radius");
    c_bt_treehom->add_option("--root", root_rank, "root rank within each component");
    auto* c_bt_collapse = c_bt->add_subcommand("collapse", "collapse the distinct-product set");
    c_bt_collapse->add_option("template", file_a, "template structure A")->required();
    auto* c_bt_invariant = c_bt->add_subcommand("invariant", "invariant-point search");
    c_bt_invariant->add_option("template", file_a, "template structure A")->required();
    c_bt_invariant->add_option("--radius", radius, "ball radius");
    c_bt_invariant->add_option("--root", root_rank, "root rank for the tree homomorphism");

    auto* c_so3 = app.add_subcommand("so3", "exact rotation-group tools");
    c_so3->require_subcommand(1);
    auto* c_so3_delta = c_so3->add_subcommand("delta", "squared displacement of a word");
    c_so3_delta->add_option("word", word_text, "group word");
    auto* c_so3_axis = c_so3->add_subcommand("axis", "rotation axis of a word");
    c_so3_axis->add_option("word", word_text, "group word");
    auto* c_so3_innc = c_so3->add_subcommand("innc", "normal-closure membership");
    c_so3_innc->add_option("word", word_text, "group word");
    auto* c_so3_approx = c_so3->add_subcommand("approx", "displacement-shrinking search");
    c_so3_approx->add_option("--d", d_text, "word to approximate against")->required();
    c_so3_approx->add_option("--depth", depth, "search depth (0 = baseline)");
    c_so3_approx->add_option("--target", target_text, "stop once delta_sq <= target (p/q)");
    for (auto* c : {c_so3_delta, c_so3_axis, c_so3_innc, c_so3_approx})
        c->add_option("--b", opt.b_override, "number of D generators (default: inferred)");

    auto* c_selfcheck = app.add_subcommand("selfcheck", "seeded randomized property checks");

    // global flags remain usable after the subcommand name
    app.fallthrough();
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (!config_path.empty()) apply_config_file(config_path, opt);
        if (json_flag) opt.text = false;

        if (*c_validate) {
            Structure s = load_structure(file_a);
            auto errs = validate(s);
            json out;
            out["ok"] = errs.empty();
            out["errors"] = errs;
            emit(opt, out);
            return 0;
        }
        if (*c_hom) {
            Structure b = load_structure(file_b), a = load_structure(file_a);
            auto h = solve_hom(b, a, opt.limits);
            json out;
            out["hom"] = h ? hom_json(b, a, *h) : json(nullptr);
            emit(opt, out);
            return 0;
        }
        if (*c_ac) {
            Structure b = load_structure(file_b), a = load_structure(file_a);
            auto la = ac_lists(b, a, opt.limits);
            json out;
            if (la) {
                out["status"] = "OK";
                out["lists"] = lists_json(b, a, *la);
            } else {
                out["status"] = "FAIL";
            }
            emit(opt, out);
            return 0;
        }
        if (*c_homlists) {
            Structure b = load_structure(file_b), a = load_structure(file_a);
            auto la = hom_lists(b, a, opt.limits);
            json out;
            if (la.all_nonempty()) {
                out["status"] = "OK";
                out["lists"] = lists_json(b, a, la);
            } else {
                out["status"] = "FAIL";
            }
            emit(opt, out);
            return 0;
        }
        if (*c_u) {
            emit_structure(opt, u_structure(load_structure(file_a), opt.limits));
            return 0;
        }
        if (*c_width1) {
            Structure a = load_structure(file_a);
            Structure u = u_structure(a, opt.limits);
            auto w = width1_witness(a, opt.limits);
            json out;
            out["width1"] = w.has_value();
            if (w) out["witness"] = hom_json(u, a, *w);
            emit(opt, out);
            return 0;
        }
        if (*c_poly) {
            Structure a = load_structure(file_a);
            auto w = poly_kind == "cyclic" ? cyclic_polymorphism(a, poly_n, opt.limits)
                                           : ts_polymorphism(a, poly_n, opt.limits);
            json out;
            out["kind"] = poly_kind;
            out["arity"] = poly_n;
            out["exists"] = w.has_value();
            if (w) {
                json table = json::array();
                for (std::size_t i = 0; i < w->keys.size(); ++i) {
                    json entry;
                    json key = json::array();
                    for (int e : w->keys[i]) key.push_back(a.universe[e]);
                    entry["args"] = key;
                    entry["value"] = a.universe[w->values[i]];
                    table.push_back(entry);
                }
                out["table"] = table;
            }
            emit(opt, out);
            return 0;
        }
        if (*c_bt_b) {
            json out;
            out["b"] = compute_b(load_structure(file_a), opt.limits).b;
            emit(opt, out);
            return 0;
        }
        if (*c_bt_fragment) {
            Fragment f = build_fragment(load_structure(file_a), radius, opt.limits);
            if (opt.text) {
                emit_structure(opt, f.graph);
            } else {
                json out;
                out["b"] = f.table.b;
                out["radius"] = f.radius;
                out["words"] = f.words.size();
                out["vertices"] = f.graph.universe.size();
                json tuples = json::object();
                for (const auto& r : f.graph.relations) tuples[r.name] = r.tuples.size();
                out["tuples"] = tuples;
                out["components"] = gaifman_components(f.graph).size();
                emit(opt, out);
            }
            return 0;
        }
        if (*c_bt_treehom) {
            Fragment f = build_fragment(load_structure(file_a), radius, opt.limits);
            auto h = tree_hom(f, root_rank);
            json out;
            out["verified"] = h.has_value();
            if (h) out["hom"] = hom_json(f.graph, f.a, *h);
            emit(opt, out);
            return 0;
        }
        if (*c_bt_collapse) {
            json out;
            out["collapse"] = collapse_check(load_structure(file_a), opt.limits);
            emit(opt, out);
            return 0;
        }
        if (*c_bt_invariant) {
            Fragment f = build_fragment(load_structure(file_a), radius, opt.limits);
            auto phi = tree_hom(f, root_rank);
            auto res = invariant_point_hom(f, *phi, opt.limits);
            json out;
            switch (res.status) {
            case InvariantPoint::Status::found: out["status"] = "found"; break;
            case InvariantPoint::Status::no_eligible_word:
                out["status"] = "no_eligible_word";
                break;
            case InvariantPoint::Status::no_invariant_word:
                out["status"] = "no_invariant_word";
                break;
            }
            out["eligible"] = res.eligible;
            if (res.word) out["word"] = format_tree_path(*res.word);
            if (res.hom) out["hom"] = hom_json(f.table.u, f.a, *res.hom);
            emit(opt, out);
            return 0;
        }
        if (*c_so3_delta || *c_so3_axis || *c_so3_innc || *c_so3_approx) {
            auto parse_so3_word = [&](const std::string& text) {
                Word w = parse_word(text, opt.b_override);
                int needed = 0;
                for (int x : w) needed = std::max(needed, std::abs(x) - 2);
                return std::make_pair(w, needed);
            };
            if (*c_so3_innc) {
                auto [w, needed] = parse_so3_word(word_text);
                json out;
                out["word"] = format_group_word(reduce(w));
                out["in_normal_closure"] = in_normal_closure(w);
                emit(opt, out);
                return 0;
            }
            if (*c_so3_delta) {
                auto [w, needed] = parse_so3_word(word_text);
                auto sys = gen_matrices(std::max(needed, opt.b_override));
                Rat d2 = delta_sq(word_matrix(sys, w));
                json out;
                out["word"] = format_group_word(reduce(w));
                out["delta_sq"] = rat_str(d2);
                out["delta_sq_float"] = rat_double(d2);
                emit(opt, out);
                return 0;
            }
            if (*c_so3_axis) {
                auto [w, needed] = parse_so3_word(word_text);
                auto sys = gen_matrices(std::max(needed, opt.b_override));
                auto ax = axis(word_matrix(sys, w));
                json out;
                out["word"] = format_group_word(reduce(w));
                if (ax) {
                    json exact = json::array(), approx = json::array();
                    for (const auto& x : *ax) {
                        exact.push_back(rat_str(x));
                        approx.push_back(rat_double(x));
                    }
                    out["axis"] = exact;
                    out["axis_float"] = approx;
                } else {
                    out["axis"] = nullptr;
                }
                emit(opt, out);
                return 0;
            }
            // approx
            auto [d, needed] = parse_so3_word(d_text);
            auto sys = gen_matrices(std::max({needed, opt.b_override, 1}));
            Rat target(0);
            {
                auto slash = target_text.find('/');
                if (slash == std::string::npos)
                    target = Rat(BigInt(target_text));
                else
                    target = Rat(BigInt(target_text.substr(0, slash)),
                                 BigInt(target_text.substr(slash + 1)));
            }
            auto res = approx_search(sys, d, depth, target, opt.limits);
            json out;
            out["d"] = format_group_word(reduce(d));
            out["depth"] = res.depth;
            out["m"] = format_group_word(res.m);
            out["delta_sq"] = rat_str(res.delta2);
            out["delta_sq_float"] = rat_double(res.delta2);
            out["baseline"] = rat_str(res.baseline);
            out["pool"] = res.pool;
            out["in_normal_closure"] = in_normal_closure(res.m);
            emit(opt, out);
            return 0;
        }
        if (*c_selfcheck) return run_selfcheck(opt);
        std::cerr << "unknown subcommand\n";
        return 1;
    } catch (const guard_error& e) {
        json out;
        out["guard"] = e.what();
        if (opt.text)
            std::cout << "guard: " << e.what() << "\n";
        else
            std::cout << out.dump() << "\n";
        return 2;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
