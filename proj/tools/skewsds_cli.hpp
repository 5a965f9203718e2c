#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewsds/skewsds.hpp"

namespace skewsds::cli {

// Exit codes.
inline constexpr int ok = 0;
inline constexpr int bad_input = 1;
inline constexpr int usage = 2;
inline constexpr int verify_fail = 3;
inline constexpr int hadamard_fail = 4;
inline constexpr int table_mismatch = 5;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string default_catalog_path()
{
#ifdef SKEWSDS_CATALOG_PATH
    return SKEWSDS_CATALOG_PATH;
#else
    return "data/catalog.sds";
#endif
}

inline Catalog load_file(const std::string& path, bool verify)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    try {
        return load_catalog(in, LoadOptions{verify});
    } catch (const CatalogError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const CatalogVerificationError& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline std::vector<std::uint32_t> parse_sizes(const std::string& text)
{
    std::vector<std::uint32_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        unsigned long x = 0;
        try {
            x = std::stoul(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size())
            throw InputError("bad block size list '" + text + "'");
        out.push_back(static_cast<std::uint32_t>(x));
    }
    if (out.empty())
        throw InputError("empty block size list");
    return out;
}

struct Named {
    std::string name;
    ParameterSet params;
    DifferenceFamily family;
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err)
        : out_(out), err_(err)
    {
    }

    int run(std::vector<std::string> args)
    {
        CLI::App app{"Cyclic supplementary difference sets and skew-Hadamard matrices"};
        app.require_subcommand(1);
        app.add_option("--catalog", catalog_path_, "Catalog file (default: bundled corpus)");

        auto* params = app.add_subcommand("params", "List the three-block parameter sets for a prime v = 3 mod 4");
        std::uint32_t pv = 0;
        std::string pformat = "text";
        params->add_option("v", pv)->required();
        params->add_option("--format", pformat)->check(CLI::IsMember({"text", "json"}));

        auto* verify = app.add_subcommand("verify", "Verify catalog entries or a corpus file");
        std::string vid, vfile;
        verify->add_option("--id", vid, "Catalog entry id");
        verify->add_option("file", vfile, "Corpus file; every entry with data is checked");

        auto* search = app.add_subcommand("search", "Search for an SDS made of subgroup orbits");
        std::uint32_t sv = 0, sq = 0;
        std::string ssizes, sout, sstrategy = "auto";
        std::uint64_t budget = SearchOptions{}.budget, seed = 0;
        unsigned workers = 1;
        std::size_t max_solutions = 1;
        double time_limit = 0;
        bool skew_gs = false;
        search->add_option("v", sv)->required();
        search->add_option("sizes", ssizes, "Comma-separated block sizes")->required();
        search->add_option("--q", sq, "Order of the subgroup H")->required();
        search->add_option("--budget", budget);
        auto* seed_opt = search->add_option("--seed", seed);
        search->add_option("--workers", workers);
        search->add_option("--max-solutions", max_solutions);
        search->add_option("--time-limit", time_limit, "Seconds, 0 for none");
        search->add_option("--strategy", sstrategy)->check(CLI::IsMember({"auto", "exhaustive", "local"}));
        search->add_option("--out", sout, "Append found families to this corpus file");
        search->add_flag("--skew-gs", skew_gs, "Four blocks of order n = v, first block skew");

        auto* hadamard = app.add_subcommand("hadamard", "Build a skew-Hadamard matrix with the Goethals-Seidel array");
        std::string hid, hfile, hout;
        bool paley_todd = false;
        hadamard->add_option("--id", hid);
        hadamard->add_option("file", hfile, "Corpus file; its first entry is used");
        hadamard->add_flag("--paley-todd", paley_todd, "Prepend the quadratic residues as the skew block");
        hadamard->add_option("--out", hout, "Matrix file, '-' for stdout");

        auto* equiv = app.add_subcommand("equiv", "Pairwise equivalence of families");
        std::vector<std::string> items;
        equiv->add_option("items", items, "Catalog ids or corpus files")->required();

        auto* table1 = app.add_subcommand("table1", "Reproduce the existence table for v <= 131");
        std::string tformat = "text";
        table1->add_option("--format", tformat)->check(CLI::IsMember({"text", "json"}));

        std::reverse(args.begin(), args.end());
        try {
            app.parse(args);
        } catch (const CLI::CallForHelp&) {
            out_ << app.help();
            return ok;
        } catch (const CLI::ParseError& e) {
            err_ << e.what() << '\n';
            return usage;
        }

        try {
            if (*params)
                return cmd_params(pv, pformat == "json");
            if (*verify) {
                if (vid.empty() == vfile.empty()) {
                    err_ << "verify: give exactly one of --id or a file\n";
                    return usage;
                }
                return cmd_verify(vid, vfile);
            }
            if (*search) {
                SearchOptions o;
                o.budget = budget;
                o.workers = workers;
                o.max_solutions = max_solutions;
                o.time_limit_seconds = time_limit;
                o.strategy = sstrategy == "exhaustive" ? SearchStrategy::exhaustive
                             : sstrategy == "local"    ? SearchStrategy::local
                                                       : SearchStrategy::automatic;
                if (seed_opt->count() == 0) {
                    seed = std::random_device{}();
                    out_ << "seed: " << seed << " (generated; pass --seed to repeat)\n";
                }
                o.seed = seed;
                return cmd_search(sv, parse_sizes(ssizes), sq, skew_gs, o, sout);
            }
            if (*hadamard) {
                if (hid.empty() == hfile.empty()) {
                    err_ << "hadamard: give exactly one of --id or a file\n";
                    return usage;
                }
                return cmd_hadamard(hid, hfile, paley_todd, hout);
            }
            if (*equiv)
                return cmd_equiv(items);
            if (*table1)
                return cmd_table1(tformat == "json");
        } catch (const InputError& e) {
            err_ << "error: " << e.what() << '\n';
            return bad_input;
        } catch (const std::invalid_argument& e) {
            err_ << "error: " << e.what() << '\n';
            return bad_input;
        } catch (const std::domain_error& e) {
            err_ << "error: " << e.what() << '\n';
            return bad_input;
        }
        return usage;
    }

private:
    const Catalog& catalog()
    {
        if (!catalog_)
            catalog_ = load_file(catalog_path_.empty() ? default_catalog_path() : catalog_path_, true);
        return *catalog_;
    }

    std::vector<Named> families_from(const Catalog& c, const std::string& origin)
    {
        std::vector<Named> out;
        for (const auto& e : c) {
            if (e.family)
                out.push_back({e.id, e.params, *e.family});
        }
        if (out.empty())
            throw InputError(origin + " contains no entry with block data");
        return out;
    }

    Named by_id(const std::string& id)
    {
        const auto* e = catalog().find(id);
        if (!e)
            throw InputError("no catalog entry '" + id + "'");
        if (!e->family)
            throw InputError("entry " + id + " (" + to_string(e->status).data() + ") has no block data");
        return {e->id, e->params, *e->family};
    }

    int cmd_params(std::uint32_t v, bool json)
    {
        if (v % 4 != 3 || !is_prime(v)) {
            err_ << "error: v = " << v << " is not a prime congruent to 3 mod 4\n";
            return bad_input;
        }
        auto rows = enumerate_P(v);
        if (json) {
            auto arr = nlohmann::json::array();
            for (const auto& p : rows)
                arr.push_back({{"v", p.v}, {"k", p.sizes}, {"lambda", p.lambda}, {"n", p.order()}});
            out_ << arr.dump(2) << '\n';
            return ok;
        }
        for (const auto& p : rows)
            out_ << p.to_string() << "  n=" << p.order() << '\n';
        return ok;
    }

    int cmd_verify(const std::string& id, const std::string& file)
    {
        std::vector<Named> fams;
        if (!id.empty())
            fams.push_back(by_id(id));
        else
            fams = families_from(load_file(file, false), file);
        bool all = true;
        for (const auto& f : fams) {
            auto sizes = f.family.sizes();
            if (sizes != f.params.sizes) {
                all = false;
                out_ << "FAIL " << f.name << ' ' << f.params.to_string() << ": block sizes";
                for (auto k : sizes)
                    out_ << ' ' << k;
                out_ << " do not match the header\n";
                continue;
            }
            auto r = verify_sds(f.family, f.params.lambda);
            if (r.ok) {
                out_ << "PASS " << f.name << ' ' << f.params.to_string() << " n=" << f.params.order() << '\n';
                continue;
            }
            all = false;
            out_ << "FAIL " << f.name << ' ' << f.params.to_string() << ": worst shift " << r.worst_shift
                 << " has count " << r.counts[r.worst_shift] << '\n';
            out_ << "  histogram (count: shifts):";
            for (const auto& [count, shifts] : r.histogram)
                out_ << ' ' << count << ':' << shifts;
            out_ << '\n';
        }
        return all ? ok : verify_fail;
    }

    int cmd_search(std::uint32_t v, const std::vector<std::uint32_t>& sizes, std::uint32_t q, bool skew_gs,
                   const SearchOptions& opts, const std::string& out_path)
    {
        if (!is_prime(v) || v < 3)
            throw InputError("v = " + std::to_string(v) + " is not an odd prime");
        SearchReport rep;
        std::int64_t lambda = 0;
        if (skew_gs) {
            rep = search_skew_gs(v, sizes, q, opts);
            for (auto k : sizes)
                lambda += k;
            lambda -= v;
        } else {
            auto l = derive_lambda(v, sizes);
            if (!l)
                throw InputError("sizes give no integral lambda for v = " + std::to_string(v));
            lambda = *l;
            rep = search_sds(ParameterSet{v, sizes, lambda}, q, opts);
        }
        if (!rep.feasible) {
            err_ << rep.message << '\n';
            return bad_input;
        }
        const char* how = rep.strategy_used == SearchStrategy::exhaustive ? "backtracking" : "local search";
        out_ << how << ": " << rep.iterations << " steps, " << rep.found.size() << " found";
        if (rep.complete)
            out_ << " (complete)";
        out_ << '\n';

        std::ofstream file;
        if (!out_path.empty()) {
            file.open(out_path, std::ios::app);
            if (!file)
                throw InputError("cannot open " + out_path + " for appending");
        }
        int status = ok;
        for (std::size_t i = 0; i < rep.found.size(); ++i) {
            std::string id = "search-" + std::to_string(v);
            for (auto k : sizes)
                id += "-" + std::to_string(k);
            id += "-s" + std::to_string(opts.seed) + "-" + std::to_string(i + 1);
            auto e = entry_from_selection(id, rep.found[i], q, lambda,
                                          "search q=" + std::to_string(q) + " seed=" + std::to_string(opts.seed));
            if (skew_gs) {
                const auto& f = *e.family;
                try {
                    auto m = build_skew_hadamard(v, f[0], f[1], f[2], f[3]);
                    out_ << "# skew-Hadamard of order " << m.order() << ": PASS\n";
                } catch (const HadamardError& ex) {
                    out_ << "# skew-Hadamard: FAIL (" << ex.what() << ")\n";
                    status = hadamard_fail;
                }
            }
            emit_entry(out_, e);
            if (file) {
                file << '\n';
                emit_entry(file, e);
            }
        }
        return status;
    }

    int cmd_hadamard(const std::string& id, const std::string& file, bool paley_todd, const std::string& out_path)
    {
        Named f = id.empty() ? families_from(load_file(file, false), file).front() : by_id(id);
        DifferenceFamily fam = paley_todd ? compose_with_paley_todd(f.family) : f.family;
        if (fam.size() != 4) {
            out_ << "FAIL " << f.name << ": the Goethals-Seidel array needs 4 blocks, got " << fam.size() << '\n';
            return hadamard_fail;
        }
        try {
            auto m = build_skew_hadamard(fam.modulus(), fam[0], fam[1], fam[2], fam[3]);
            if (out_path == "-") {
                write_matrix(out_, m);
            } else if (!out_path.empty()) {
                std::ofstream os(out_path);
                if (!os)
                    throw InputError("cannot open " + out_path + " for writing");
                write_matrix(os, m);
            }
            if (out_path != "-")
                out_ << "PASS " << f.name << ": skew-Hadamard matrix of order " << m.order() << '\n';
            return ok;
        } catch (const HadamardError& ex) {
            out_ << "FAIL " << f.name << ": " << ex.what() << '\n';
            return hadamard_fail;
        }
    }

    static std::string describe(const FamilyTransform& t)
    {
        std::ostringstream os;
        os << "m=" << t.multiplier << " blocks=(";
        for (std::size_t k = 0; k < t.source.size(); ++k)
            os << (k ? "," : "") << t.source[k] + 1;
        os << ") shifts=(";
        for (std::size_t k = 0; k < t.shifts.size(); ++k)
            os << (k ? "," : "") << t.shifts[k];
        os << ')';
        return os.str();
    }

    int cmd_equiv(const std::vector<std::string>& items)
    {
        std::vector<Named> fams;
        for (const auto& it : items) {
            if (catalog().find(it)) {
                fams.push_back(by_id(it));
            } else if (std::filesystem::exists(it)) {
                for (auto& f : families_from(load_file(it, false), it))
                    fams.push_back(std::move(f));
            } else {
                throw InputError("'" + it + "' is neither a catalog id nor a file");
            }
        }
        if (fams.size() < 2)
            throw InputError("equiv needs at least two families");

        std::vector<CanonicalForm> forms;
        for (const auto& f : fams)
            forms.push_back(canonical_form(f.family));
        const std::size_t n = fams.size();
        std::vector<std::vector<char>> eq(n, std::vector<char>(n, 1));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& a = fams[i];
                const auto& b = fams[j];
                out_ << a.name << ' ' << b.name << ' ';
                if (a.family.modulus() != b.family.modulus()) {
                    eq[i][j] = eq[j][i] = 0;
                    out_ << "NONEQUIVALENT (different moduli)\n";
                    continue;
                }
                auto sa = a.family.sizes(), sb = b.family.sizes();
                std::sort(sa.begin(), sa.end());
                std::sort(sb.begin(), sb.end());
                const bool same = sa == sb && forms[i] == forms[j];
                eq[i][j] = eq[j][i] = same;
                if (!same) {
                    out_ << "NONEQUIVALENT" << (sa == sb ? "" : " (block sizes differ)") << '\n';
                    continue;
                }
                out_ << "EQUIVALENT\n  " << a.name << " -> canonical: " << describe(forms[i].witness) << "\n  "
                     << b.name << " -> canonical: " << describe(forms[j].witness) << '\n';
            }
        }
        out_ << "\nmatrix (1 = equivalent):\n";
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                out_ << (j ? " " : "") << int(eq[i][j]);
            out_ << "  " << fams[i].name << '\n';
        }
        return ok;
    }

    int cmd_table1(bool json)
    {
        auto rows = table1_report(catalog());
        auto diffs = compare_table1(rows);
        if (json) {
            auto arr = nlohmann::json::array();
            for (const auto& r : rows) {
                arr.push_back({{"v", r.params.v},
                               {"k", r.params.sizes},
                               {"lambda", r.params.lambda},
                               {"n", r.params.order()},
                               {"exists", r.exists},
                               {"entry", r.entry_id},
                               {"source", std::string(to_string(r.source))}});
            }
            nlohmann::json doc{{"rows", arr}, {"match", diffs.empty()}, {"diffs", diffs}};
            out_ << doc.dump(2) << '\n';
        } else {
            out_ << std::left << std::setw(22) << "parameters" << std::setw(6) << "n" << std::setw(5) << "yes"
                 << "entry\n";
            for (const auto& r : rows) {
                out_ << std::setw(22) << r.params.to_string() << std::setw(6) << r.params.order() << std::setw(5)
                     << (r.exists ? "yes" : "?") << r.entry_id;
                if (r.source == EntryStatus::external)
                    out_ << " (external)";
                out_ << '\n';
            }
            for (const auto& d : diffs)
                out_ << "MISMATCH " << d << '\n';
        }
        return diffs.empty() ? ok : table_mismatch;
    }

    std::ostream& out_;
    std::ostream& err_;
    std::string catalog_path_;
    std::optional<Catalog> catalog_;
};

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    return Runner(out, err).run(args);
}

} // namespace skewsds::cli
