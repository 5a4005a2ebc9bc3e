#pragma once

#include "stuffedmap/bridged_report.hpp"
#include "stuffedmap/map_json.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

namespace smap::cli {

// exit codes: 0 ok, 2 invalid spec/input, 3 search budget exceeded,
// 4 solver did not stabilize, 5 roundtrip failure, 6 failed identity
enum ExitCode {
    kOk = 0,
    kInvalidInput = 2,
    kBudget = 3,
    kNoStabilization = 4,
    kRoundtripFailure = 5,
    kFailedIdentity = 6,
};

inline long long env_budget_ms() {
    const char* v = std::getenv("STUFFEDMAP_BUDGET_MS");
    return v ? std::atoll(v) : 0;
}

inline CellSet load_cells(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidCellSpec("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidCellSpec(e.what());
    }
    return CellSet::parse_json(j);
}

inline void write_output(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        if (!body.empty() && body.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(path);
    out << body;
}

inline std::string table_csv(const CountTable& t) {
    std::string s = "t_power";
    for (auto& n : t.cells.weight_names) s += "," + n;
    s += ",count_num,count_den\n";
    for (auto& [k, c] : t.entries) {
        s += std::to_string(k.tpow);
        for (int m : k.mult) s += "," + std::to_string(m);
        s += "," + detail::to_string_i128(c.num()) + "," + detail::to_string_i128(c.den()) + "\n";
    }
    return s;
}

inline nlohmann::json table_json(const CountTable& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (auto& [k, c] : t.entries) {
        nlohmann::json mult = nlohmann::json::object();
        for (size_t i = 0; i < k.mult.size(); ++i)
            if (k.mult[i]) mult[t.cells.weight_names[i]] = k.mult[i];
        rows.push_back({{"t_power", k.tpow},
                        {"cells", mult},
                        {"num", detail::to_string_i128(c.num())},
                        {"den", detail::to_string_i128(c.den())}});
    }
    return {{"boundary", t.ell},
            {"branch_marked", t.branch_marked},
            {"pointed", t.pointed},
            {"complete_through", t.complete_through},
            {"entries", rows}};
}

inline int run(int argc, const char* const* argv) {
    CLI::App app{"exact enumeration and generating-function engine for stuffed maps"};
    app.require_subcommand(1);

    std::string cells_path, out_path, maps_out, format = "json", which = "tree", input_path;
    int boundary = -1, max_vertices = 6, order = 10;
    bool bms = false, pointed = false, inverse = false;

    auto* enumerate = app.add_subcommand("enumerate", "exhaustively enumerate rooted maps");
    enumerate->add_option("--cells", cells_path, "cell-set spec (JSON)")->required();
    enumerate->add_option("--boundary", boundary, "boundary length (omit for edge-rooted)");
    enumerate->add_option("--max-vertices", max_vertices, "vertex bound")->required();
    enumerate->add_flag("--bms", bms, "choose spurious corners on every branch boundary");
    enumerate->add_flag("--pointed", pointed, "mark every admissible source");
    enumerate->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    enumerate->add_option("--out", out_path, "output path (default stdout)");
    enumerate->add_option("--maps-out", maps_out, "stream the maps as JSON lines");

    auto* series = app.add_subcommand("series", "solve a generating-function route");
    series->add_option("--cells", cells_path)->required();
    series->add_option("--order", order, "truncation order in t");
    series->add_option("--which", which)
        ->check(CLI::IsMember({"tutte", "tree", "functional", "stuffed-tutte", "pointed"}));
    series->add_option("--boundary", boundary, "boundary length for disk series");
    series->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    series->add_option("--out", out_path);

    auto* bijection = app.add_subcommand("bijection", "check or apply the hypermobile bijection");
    auto* check = bijection->add_subcommand("check", "roundtrip all enumerated objects");
    check->add_option("--cells", cells_path)->required();
    check->add_option("--max-vertices", max_vertices);
    check->add_option("--out", out_path);
    auto* apply = bijection->add_subcommand("apply", "map -> hypermobile (or back with --inverse)");
    apply->add_option("--input", input_path)->required();
    apply->add_flag("--inverse", inverse, "hypermobile -> map");
    apply->add_option("--cells", cells_path, "cell set for validation (optional)");
    apply->add_option("--out", out_path);

    auto* demo = app.add_subcommand("demo-bridged-quadrangulations",
                                    "the full worked example with its adjudication ledger");
    demo->add_option("--order", order);
    demo->add_option("--max-vertices", max_vertices);
    demo->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kInvalidInput;
    }

    long long budget = env_budget_ms();
    try {
        if (enumerate->parsed()) {
            CellSet s = load_cells(cells_path);
            EnumResult r = bms ? enumerate_bms(s, boundary, max_vertices, budget)
                               : enumerate_stuffed(s, boundary, max_vertices, false, budget);
            if (pointed) r = mark_points(r);
            if (!maps_out.empty()) {
                std::ofstream ms(maps_out);
                for (auto& m : r.maps) ms << to_json(m).dump() << "\n";
            }
            write_output(out_path, format == "csv" ? table_csv(r.table) : table_json(r.table).dump(2));
            return kOk;
        }
        if (series->parsed()) {
            CellSet s = load_cells(cells_path);
            bool whole_vector = boundary < 0 && which != "tree" && which != "pointed" &&
                                format != "csv";
            int ell = boundary < 0 ? 2 : boundary;
            int ell_max = whole_vector ? std::max(8, s.max_boundary_length()) : ell;
            TSeries result = TSeries::zero(s.universe(), order);
            MomentVector mv;
            mv.order = -1;
            if (which == "tutte") {
                mv = solve_tutte_ordinary(s, std::max(ell_max, 2 * order), order);
            } else if (which == "tree") {
                result = s.has_branches() ? solve_stuffed_tree_gamma(s, order)
                                          : solve_tree_gamma(s, order);
            } else if (which == "functional") {
                mv = solve_stuffed_functional(s, ell_max, order);
            } else if (which == "stuffed-tutte") {
                mv = solve_stuffed_tutte(s, ell_max, order);
            } else if (which == "pointed") {
                result = pointed_stuffed(s, ell, order);
            }
            if (mv.order >= 0 && whole_vector) {
                write_output(out_path, to_json(mv.T, mv.gamma2).dump(2));
                return kOk;
            }
            if (mv.order >= 0 && mv.T.count(ell)) result = mv.T[ell];
            write_output(out_path, format == "csv" ? series_csv(result) : to_json(result).dump(2));
            return kOk;
        }
        if (check->parsed()) {
            CellSet s = load_cells(cells_path);
            BijectionReport rep = verify_bijection(s, max_vertices, budget);
            write_output(out_path, rep.to_json().dump(2));
            return rep.failures.empty() && rep.map_counts == rep.hm_counts ? kOk
                                                                           : kRoundtripFailure;
        }
        if (apply->parsed()) {
            std::ifstream in(input_path);
            if (!in) throw InvalidInput("cannot open " + input_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw InvalidInput(e.what());
            }
            Conventions cv = pinned_conventions();
            if (inverse) {
                Hypermobile h = hypermobile_from_json(j);
                PsiOutcome q = psi(h, cv);
                if (!q.ok) throw InvalidInput(q.failure);
                write_output(out_path, to_json(canonicalized(q.m)).dump(2));
            } else {
                StuffedMap m = canonicalized(stuffed_map_from_json(j));
                PhiOutcome p = phi(m, cv);
                if (!p.ok) throw InvalidInput(p.failure);
                write_output(out_path, to_json(p.h).dump(2));
            }
            return kOk;
        }
        if (demo->parsed()) {
            BridgedReport rep = bridged_quadrangulation_report(order, max_vertices, budget);
            write_output(out_path, rep.to_json().dump(2));
            return rep.adopted_all_pass() ? kOk : kFailedIdentity;
        }
    } catch (const BudgetExceeded&) {
        std::cerr << "error: search budget exceeded\n";
        return kBudget;
    } catch (const NoStabilization& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoStabilization;
    } catch (const InvalidCellSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    }
    return kOk;
}

} // namespace smap::cli
