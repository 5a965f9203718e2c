#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skewsds/sds.hpp"
#include "skewsds/search.hpp"
#include "skewsds/zmod.hpp"

// Line-oriented corpus format, one entry per stanza:
//
//   sds id=sec3-family1 v=239 k=119,112,106 lambda=158 status=verified
//   provenance: free text
//   orbit h=201 q=7            | block: 0 1 3      | compose: paley_todd + <id>
//   reps[1]: 1 3 5 ...         | block: ...        |
//   end
//
// '#' starts a comment line. Numbers are decimal, space separated.

namespace skewsds {

enum class EntryStatus { verified, open, external, erratum };

inline std::string_view to_string(EntryStatus s)
{
    switch (s) {
    case EntryStatus::verified: return "verified";
    case EntryStatus::open: return "open";
    case EntryStatus::external: return "external";
    case EntryStatus::erratum: return "erratum";
    }
    return "?";
}

enum class Encoding { none, blocks, orbit, compose };

struct CatalogEntry {
    std::string id;
    ParameterSet params;
    EntryStatus status = EntryStatus::open;
    std::string provenance;

    Encoding encoding = Encoding::none;
    std::vector<std::vector<residue>> blocks;  // Encoding::blocks, verbatim
    OrbitSelection selection;                  // Encoding::orbit, verbatim
    std::uint32_t q = 0;                       // Encoding::orbit
    std::string compose_with;                  // Encoding::compose

    /// Materialized blocks; empty for open and external entries.
    std::optional<DifferenceFamily> family;
    /// Set when the family was checked against params.lambda.
    std::optional<bool> verifies;
};

class CatalogError : public std::runtime_error {
public:
    CatalogError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class CatalogVerificationError : public std::runtime_error {
public:
    CatalogVerificationError(std::string id, const std::string& what)
        : std::runtime_error("entry " + id + ": " + what), id_(std::move(id))
    {
    }
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<CatalogEntry> entries)
        : entries_(std::move(entries))
    {
    }

    const std::vector<CatalogEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    const CatalogEntry* find(std::string_view id) const
    {
        for (const auto& e : entries_) {
            if (e.id == id)
                return &e;
        }
        return nullptr;
    }

    const CatalogEntry& at(std::string_view id) const
    {
        if (auto* e = find(id))
            return *e;
        throw std::out_of_range("no catalog entry with id " + std::string(id));
    }

private:
    std::vector<CatalogEntry> entries_;
};

struct LoadOptions {
    /// Check every materialized entry against its status (verified must
    /// pass, erratum must fail) and throw CatalogVerificationError otherwise.
    bool verify = true;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::uint64_t parse_number(std::string_view tok, std::size_t line)
{
    if (tok.empty() || tok.size() > 12 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw CatalogError(line, "expected a decimal number, got '" + std::string(tok) + "'");
    return std::stoull(std::string(tok));
}

inline std::vector<residue> parse_numbers(std::string_view text, std::size_t line)
{
    std::vector<residue> out;
    std::istringstream is{std::string(text)};
    std::string tok;
    while (is >> tok)
        out.push_back(static_cast<residue>(parse_number(tok, line)));
    return out;
}

inline std::vector<std::uint32_t> parse_list(std::string_view text, std::size_t line)
{
    std::vector<std::uint32_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos)
            comma = text.size();
        out.push_back(static_cast<std::uint32_t>(parse_number(text.substr(pos, comma - pos), line)));
        pos = comma + 1;
    }
    return out;
}

inline std::map<std::string, std::string> parse_keys(std::string_view text, std::size_t line)
{
    std::map<std::string, std::string> out;
    std::istringstream is{std::string(text)};
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CatalogError(line, "expected key=value, got '" + tok + "'");
        if (!out.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second)
            throw CatalogError(line, "duplicate key '" + tok.substr(0, eq) + "'");
    }
    return out;
}

inline EntryStatus parse_status(const std::string& s, std::size_t line)
{
    for (auto st : {EntryStatus::verified, EntryStatus::open, EntryStatus::external, EntryStatus::erratum}) {
        if (s == to_string(st))
            return st;
    }
    throw CatalogError(line, "unknown status '" + s + "'");
}

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

inline void materialize(std::vector<CatalogEntry>& entries, std::size_t i, std::vector<int>& state)
{
    auto& e = entries[i];
    if (state[i] == 2)
        return;
    if (state[i] == 1)
        throw CatalogVerificationError(e.id, "composition cycle");
    state[i] = 1;
    switch (e.encoding) {
    case Encoding::none:
        break;
    case Encoding::blocks:
        e.family = DifferenceFamily::from_lists(e.params.v, e.blocks);
        break;
    case Encoding::orbit: {
        const Modulus v(e.params.v);
        OrbitSystem orbits(v, e.selection.h);
        if (orbits.order() != e.q)
            throw CatalogVerificationError(e.id, "h=" + std::to_string(e.selection.h) + " has order " +
                                                     std::to_string(orbits.order()) + ", not q=" + std::to_string(e.q));
        e.family = expand(orbits, e.selection);
        break;
    }
    case Encoding::compose: {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const CatalogEntry& x) { return x.id == e.compose_with; });
        if (it == entries.end())
            throw CatalogVerificationError(e.id, "composition refers to unknown entry " + e.compose_with);
        const auto j = static_cast<std::size_t>(it - entries.begin());
        materialize(entries, j, state);
        if (!entries[j].family)
            throw CatalogVerificationError(e.id, "composition refers to entry without blocks " + e.compose_with);
        entries[i].family = compose_with_paley_todd(*entries[j].family);
        break;
    }
    }
    state[i] = 2;
}

} // namespace detail

inline Catalog load_catalog(std::istream& in, const LoadOptions& opts = {})
{
    using namespace detail;
    std::vector<CatalogEntry> entries;
    std::optional<CatalogEntry> cur;
    std::size_t lineno = 0;
    std::size_t header_line = 0;
    std::string raw;

    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#')
            continue;

        if (!cur) {
            if (!starts_with(line, "sds "))
                throw CatalogError(lineno, "expected 'sds' header, got '" + line + "'");
            auto keys = parse_keys(std::string_view(line).substr(4), lineno);
            for (const char* k : {"id", "v", "k", "lambda", "status"}) {
                if (!keys.count(k))
                    throw CatalogError(lineno, std::string("header is missing '") + k + "'");
            }
            if (keys.size() != 5)
                throw CatalogError(lineno, "unexpected header key");
            CatalogEntry e;
            e.id = keys["id"];
            e.params.v = static_cast<std::uint32_t>(parse_number(keys["v"], lineno));
            e.params.sizes = parse_list(keys["k"], lineno);
            e.params.lambda = static_cast<std::int64_t>(parse_number(keys["lambda"], lineno));
            e.status = parse_status(keys["status"], lineno);
            if (e.params.v < 2)
                throw CatalogError(lineno, "v must be at least 2");
            if (!e.params.satisfies_counting())
                throw CatalogError(lineno, e.params.to_string() + " violates lambda(v-1) = sum k(k-1)");
            for (const auto& other : entries) {
                if (other.id == e.id)
                    throw CatalogError(lineno, "duplicate id " + e.id);
            }
            cur = std::move(e);
            header_line = lineno;
            continue;
        }

        auto& e = *cur;
        if (line == "end") {
            if (e.encoding == Encoding::blocks && e.blocks.size() != e.params.sizes.size())
                throw CatalogError(lineno, "entry " + e.id + " has " + std::to_string(e.blocks.size()) +
                                               " blocks, header lists " + std::to_string(e.params.sizes.size()));
            if (e.encoding == Encoding::orbit && e.selection.reps.size() != e.params.sizes.size())
                throw CatalogError(lineno, "entry " + e.id + " has " + std::to_string(e.selection.reps.size()) +
                                               " rep sets, header lists " + std::to_string(e.params.sizes.size()));
            const bool has_data = e.encoding != Encoding::none;
            const bool wants_data = e.status == EntryStatus::verified || e.status == EntryStatus::erratum;
            if (has_data != wants_data)
                throw CatalogError(lineno, "entry " + e.id + " with status " + std::string(to_string(e.status)) +
                                               (wants_data ? " needs" : " must not carry") + " blocks");
            entries.push_back(std::move(e));
            cur.reset();
            continue;
        }
        if (starts_with(line, "provenance:")) {
            e.provenance = trim(std::string_view(line).substr(11));
            continue;
        }
        auto claim = [&](Encoding enc) {
            if (e.encoding != Encoding::none && e.encoding != enc)
                throw CatalogError(lineno, "entry " + e.id + " mixes encodings");
            e.encoding = enc;
        };
        if (starts_with(line, "block:")) {
            claim(Encoding::blocks);
            auto members = parse_numbers(std::string_view(line).substr(6), lineno);
            for (auto x : members) {
                if (x >= e.params.v)
                    throw CatalogError(lineno, "residue " + std::to_string(x) + " outside Z_" + std::to_string(e.params.v));
            }
            e.blocks.push_back(std::move(members));
            continue;
        }
        if (starts_with(line, "orbit ")) {
            if (e.encoding == Encoding::orbit)
                throw CatalogError(lineno, "duplicate orbit line");
            claim(Encoding::orbit);
            auto keys = parse_keys(std::string_view(line).substr(6), lineno);
            if (!keys.count("h") || !keys.count("q") || keys.size() != 2)
                throw CatalogError(lineno, "orbit line needs exactly h= and q=");
            e.selection.v = e.params.v;
            e.selection.h = static_cast<residue>(parse_number(keys["h"], lineno));
            e.q = static_cast<std::uint32_t>(parse_number(keys["q"], lineno));
            continue;
        }
        if (starts_with(line, "reps[")) {
            if (e.encoding != Encoding::orbit)
                throw CatalogError(lineno, "reps line before orbit line");
            const auto close = line.find("]:");
            if (close == std::string::npos)
                throw CatalogError(lineno, "malformed reps line");
            const auto idx = parse_number(std::string_view(line).substr(5, close - 5), lineno);
            if (idx != e.selection.reps.size() + 1)
                throw CatalogError(lineno, "reps index " + std::to_string(idx) + " out of sequence");
            auto reps = parse_numbers(std::string_view(line).substr(close + 2), lineno);
            for (auto x : reps) {
                if (x >= e.params.v)
                    throw CatalogError(lineno, "representative " + std::to_string(x) + " outside Z_" +
                                                   std::to_string(e.params.v));
            }
            e.selection.reps.push_back(std::move(reps));
            continue;
        }
        if (starts_with(line, "compose:")) {
            claim(Encoding::compose);
            const std::string rest = trim(std::string_view(line).substr(8));
            const std::string prefix = "paley_todd + ";
            if (!starts_with(rest, prefix) || rest.size() == prefix.size())
                throw CatalogError(lineno, "compose line must read 'compose: paley_todd + <id>'");
            e.compose_with = trim(std::string_view(rest).substr(prefix.size()));
            continue;
        }
        throw CatalogError(lineno, "unrecognized line '" + line + "'");
    }
    if (cur)
        throw CatalogError(lineno, "entry " + cur->id + " starting at line " + std::to_string(header_line) +
                                       " is not terminated by 'end'");

    std::vector<int> state(entries.size(), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        try {
            detail::materialize(entries, i, state);
        } catch (const std::invalid_argument& ex) {
            throw CatalogVerificationError(entries[i].id, ex.what());
        } catch (const std::out_of_range& ex) {
            throw CatalogVerificationError(entries[i].id, ex.what());
        }
    }

    for (auto& e : entries) {
        if (!e.family)
            continue;
        if (!opts.verify)
            continue;
        e.verifies = e.family->sizes() == e.params.sizes && verify_sds(*e.family, e.params.lambda).ok;
        if (e.status == EntryStatus::verified && !*e.verifies)
            throw CatalogVerificationError(e.id, "does not verify as " + e.params.to_string());
        if (e.status == EntryStatus::erratum && *e.verifies)
            throw CatalogVerificationError(e.id, "marked erratum but verifies as " + e.params.to_string());
    }
    return Catalog(std::move(entries));
}

inline void emit_entry(std::ostream& os, const CatalogEntry& e)
{
    os << "sds id=" << e.id << " v=" << e.params.v << " k=";
    for (std::size_t i = 0; i < e.params.sizes.size(); ++i)
        os << (i ? "," : "") << e.params.sizes[i];
    os << " lambda=" << e.params.lambda << " status=" << to_string(e.status) << '\n';
    if (!e.provenance.empty())
        os << "provenance: " << e.provenance << '\n';
    auto list = [&os](const std::vector<residue>& xs) {
        for (auto x : xs)
            os << ' ' << x;
        os << '\n';
    };
    switch (e.encoding) {
    case Encoding::none:
        break;
    case Encoding::blocks:
        for (const auto& b : e.blocks) {
            os << "block:";
            list(b);
        }
        break;
    case Encoding::orbit:
        os << "orbit h=" << e.selection.h << " q=" << e.q << '\n';
        for (std::size_t i = 0; i < e.selection.reps.size(); ++i) {
            os << "reps[" << i + 1 << "]:";
            list(e.selection.reps[i]);
        }
        break;
    case Encoding::compose:
        os << "compose: paley_todd + " << e.compose_with << '\n';
        break;
    }
    os << "end\n";
}

inline void emit_catalog(std::ostream& os, const Catalog& c)
{
    bool first = true;
    for (const auto& e : c) {
        if (!first)
            os << '\n';
        emit_entry(os, e);
        first = false;
    }
}

/// Orbit-form entry for a search result.
inline CatalogEntry entry_from_selection(std::string id, const OrbitSelection& sel, std::uint32_t q, std::int64_t lambda,
                                         std::string provenance)
{
    CatalogEntry e;
    e.id = std::move(id);
    e.status = EntryStatus::verified;
    e.provenance = std::move(provenance);
    e.encoding = Encoding::orbit;
    e.selection = sel;
    e.q = q;
    e.family = expand(sel);
    e.params = ParameterSet{sel.v, e.family->sizes(), lambda};
    return e;
}

// ---------------------------------------------------------------------------
// Existence table for the three-block family, v <= 131
// ---------------------------------------------------------------------------

struct Table1Row {
    ParameterSet params;
    bool exists = false;
    /// Entry backing a "yes" row, if any.
    std::string entry_id;
    EntryStatus source = EntryStatus::open;
};

/// Existence table for v <= 131: (v, k1, k2, k3, lambda, yes?). The row
/// (127;60,57,55;77) is printed with k3 = 56, which fails the counting
/// identity; see printed_table1_typo().
inline const std::vector<Table1Row>& expected_table1()
{
    static const std::vector<Table1Row> rows = [] {
        struct Raw {
            std::uint32_t v, k1, k2, k3;
            std::int64_t lambda;
            bool yes;
        };
        constexpr Raw raw[] = {
            {3, 1, 1, 0, 0, true},       {7, 3, 3, 1, 2, true},       {7, 2, 2, 2, 1, true},
            {11, 4, 4, 3, 3, true},      {19, 9, 7, 6, 8, true},      {19, 7, 7, 7, 7, true},
            {23, 11, 10, 7, 11, true},   {31, 15, 15, 10, 17, true},  {31, 13, 12, 12, 14, true},
            {43, 21, 21, 15, 25, true},  {43, 21, 18, 16, 23, true},  {43, 20, 17, 17, 22, true},
            {43, 19, 19, 16, 22, true},  {47, 22, 22, 17, 26, true},  {47, 21, 19, 19, 24, true},
            {59, 29, 28, 22, 35, true},  {67, 31, 28, 28, 37, true},  {67, 30, 30, 27, 37, true},
            {71, 34, 32, 28, 41, false}, {71, 31, 31, 30, 39, true},  {79, 39, 37, 31, 48, true},
            {79, 38, 35, 32, 46, false}, {79, 37, 34, 33, 45, true},  {83, 39, 37, 34, 48, false},
            {83, 37, 37, 35, 47, false}, {103, 51, 48, 42, 64, true}, {103, 51, 46, 43, 63, true},
            {103, 49, 49, 42, 63, true}, {103, 46, 46, 45, 60, true}, {107, 49, 48, 46, 63, false},
            {127, 61, 58, 54, 78, false}, {127, 60, 57, 55, 77, false}, {127, 57, 57, 57, 76, true},
            {131, 65, 61, 55, 83, true}, {131, 64, 58, 57, 81, false}, {131, 61, 61, 56, 80, true},
        };
        std::vector<Table1Row> out;
        for (const auto& r : raw)
            out.push_back({ParameterSet{r.v, {r.k1, r.k2, r.k3}, r.lambda}, r.yes, {}, EntryStatus::open});
        return out;
    }();
    return rows;
}

/// The one printed row that is not a parameter set at all, and its
/// correction (the only family member sharing v, k1, k2 and lambda).
inline std::pair<ParameterSet, ParameterSet> printed_table1_typo()
{
    return {ParameterSet{127, {60, 57, 56}, 77}, ParameterSet{127, {60, 57, 55}, 77}};
}

/// One row per member of the family for each prime v = 3 (mod 4) up to
/// max_v; a row exists iff some verified or external entry has exactly
/// those parameters.
inline std::vector<Table1Row> table1_report(const Catalog& catalog, std::uint32_t max_v = 131)
{
    std::vector<Table1Row> rows;
    for (std::uint32_t v = 3; v <= max_v; v += 4) {
        if (!is_prime(v))
            continue;
        for (auto& p : enumerate_P(v)) {
            Table1Row row{p, false, {}, EntryStatus::open};
            for (const auto& e : catalog) {
                if (e.params != p)
                    continue;
                if (e.status == EntryStatus::verified || e.status == EntryStatus::external) {
                    row.exists = true;
                    row.entry_id = e.id;
                    row.source = e.status;
                    if (e.status == EntryStatus::verified)
                        break;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Human-readable differences against expected_table1(); empty on a match.
inline std::vector<std::string> compare_table1(const std::vector<Table1Row>& rows)
{
    std::vector<std::string> diffs;
    const auto& want = expected_table1();
    for (const auto& w : want) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const Table1Row& r) { return r.params == w.params; });
        if (it == rows.end())
            diffs.push_back("missing row " + w.params.to_string());
        else if (it->exists != w.exists)
            diffs.push_back(w.params.to_string() + ": expected " + (w.exists ? "yes" : "?") + ", got " +
                            (it->exists ? "yes" : "?"));
    }
    for (const auto& r : rows) {
        auto it = std::find_if(want.begin(), want.end(), [&](const Table1Row& w) { return w.params == r.params; });
        if (it == want.end())
            diffs.push_back("unexpected row " + r.params.to_string());
    }
    return diffs;
}

} // namespace skewsds
