#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "digitseq/a066364.hpp"
#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"
#include "digitseq/families.hpp"
#include "digitseq/kernel.hpp"
#include "digitseq/search.hpp"

namespace digitseq::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_not_term = 3,
    exit_internal = 4,
    exit_verification = 5,
};

namespace detail {

using json = nlohmann::ordered_json;

// Paper-table factor rendering: flat ascending, " * " separated, with a
// single factor 3 pulled to the front ("3 * 29 * 383", "3 * 2").
inline std::string pretty_factors(const arith::Factorization& f) {
    std::vector<u64> flat;
    for (const auto& [p, e] : f.factors)
        for (unsigned i = 0; i < e; ++i) flat.push_back(p);
    if (flat.empty()) return "1";
    if (f.multiplicity(3) == 1) {
        auto three = std::find(flat.begin(), flat.end(), u64{3});
        std::rotate(flat.begin(), three, three + 1);
    }
    std::string out;
    for (u64 p : flat) {
        if (!out.empty()) out += " * ";
        out += std::to_string(p);
    }
    return out;
}

enum class Format { jsonl, csv };

// One schema-stable record per line; every record carries a kind
// discriminator and a schema version.
class Emitter {
  public:
    Emitter(Format fmt, std::ostream& out) : fmt_(fmt), out_(out) {}

    void note(const std::string& text) {
        if (fmt_ == Format::csv) {
            out_ << "# " << text << '\n';
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "report";
        j["name"] = "note";
        j["passed"] = true;
        j["notes"] = json::array({text});
        out_ << j.dump() << '\n';
    }

    void term(u64 value, bool is_term, unsigned residue,
              std::optional<search::TermClass> cls,
              const arith::Factorization& f) {
        if (fmt_ == Format::csv) {
            header("v,kind,value,is_term,residue_mod_9,class,factors");
            out_ << "1,term," << value << ',' << (is_term ? 1 : 0) << ','
                 << residue << ',' << (cls ? search::to_string(*cls) : "") << ','
                 << f.to_string() << '\n';
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "term";
        j["value"] = value;
        j["is_term"] = is_term;
        j["residue_mod_9"] = residue;
        if (cls) j["class"] = search::to_string(*cls);
        j["factors"] = factors_json(f);
        j["pretty"] = pretty_factors(f);
        out_ << j.dump() << '\n';
    }

    void order(u64 value, u64 order_e, unsigned n_p, std::optional<bool> member) {
        if (fmt_ == Format::csv) {
            header("v,kind,value,order_e,n_p,member");
            out_ << "1,order," << value << ',' << order_e << ',' << n_p << ',';
            if (member) out_ << (*member ? 1 : 0);
            out_ << '\n';
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "order";
        j["value"] = value;
        j["order_e"] = order_e;
        j["n_p"] = n_p;
        if (member) j["member"] = *member;
        out_ << j.dump() << '\n';
    }

    void factor_verdict(u64 value, const arith::Factorization& f) {
        if (fmt_ == Format::csv) {
            header("v,kind,value,factors,pretty");
            out_ << "1,verdict," << value << ',' << f.to_string() << ",\""
                 << pretty_factors(f) << "\"\n";
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "verdict";
        j["op"] = "factor";
        j["value"] = value;
        j["factors"] = factors_json(f);
        j["canonical"] = f.to_string();
        j["pretty"] = pretty_factors(f);
        out_ << j.dump() << '\n';
    }

    void self_one(u64 value) {
        if (fmt_ == Format::csv) {
            header("v,kind,value,self_one");
            out_ << "1,verdict," << value << ",1\n";
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "verdict";
        j["op"] = "selfone";
        j["value"] = value;
        j["self_one"] = true;
        out_ << j.dump() << '\n';
    }

    void family(const families::FamilySpec& spec, const families::FamilyRecord& rec) {
        if (fmt_ == Format::csv) {
            header("v,kind,base_term,m,p,q,i,candidate,verified");
            out_ << "1,family," << spec.base_term << ',' << spec.m << ',' << spec.p
                 << ',' << spec.q << ',' << rec.i << ',' << to_string(rec.candidate)
                 << ',' << (rec.verified ? 1 : 0) << '\n';
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "family";
        j["base_term"] = spec.base_term;
        j["m"] = spec.m;
        j["p"] = spec.p;
        j["q"] = spec.q;
        j["i"] = rec.i;
        // candidate may exceed 64 bits; a decimal string keeps it lossless
        j["candidate"] = to_string(rec.candidate);
        j["verified"] = rec.verified;
        out_ << j.dump() << '\n';
    }

    void trace(const families::BlockSumTrace& t) {
        if (fmt_ == Format::csv) {
            note("trace x=" + std::to_string(t.x) + " p=" + std::to_string(t.p) +
                 " block_len=" + std::to_string(t.block_len) + " block_sum=" +
                 t.block_sum + " valid=" + (t.valid ? "1" : "0"));
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "report";
        j["name"] = "block-sum-argument";
        j["x"] = t.x;
        j["p"] = t.p;
        j["n_p"] = t.n_p;
        j["block_len"] = t.block_len;
        j["quotient"] = t.quotient;
        j["copies"] = t.copies;
        j["single_copy_sum"] = t.single_copy_sum;
        j["block_sum"] = t.block_sum;
        j["block_sum_divisible"] = t.block_sum_divisible;
        j["direct_divisible"] = t.direct_divisible;
        j["consistent"] = t.consistent;
        j["passed"] = t.valid;
        out_ << j.dump() << '\n';
    }

    void report(const search::Report& rep) {
        if (fmt_ == Format::csv) {
            std::string line = "report " + rep.name + ": " +
                               (rep.passed ? "pass" : "FAIL") + " (" +
                               std::to_string(rep.records_checked) + " checked)";
            for (const auto& n : rep.notes) line += "; " + n;
            note(line);
            return;
        }
        json j;
        j["v"] = 1;
        j["kind"] = "report";
        j["name"] = rep.name;
        j["passed"] = rep.passed;
        j["records_checked"] = rep.records_checked;
        j["notes"] = rep.notes;
        j["counterexamples"] = rep.counterexamples;
        if (!rep.primes_seen.empty()) j["primes_seen"] = rep.primes_seen;
        out_ << j.dump() << '\n';
    }

  private:
    static json factors_json(const arith::Factorization& f) {
        json arr = json::array();
        for (const auto& [p, e] : f.factors) arr.push_back(json::array({p, e}));
        return arr;
    }

    // One header per record kind; re-emitted only when the kind changes
    // (e.g. `tables` without an argument mixes order and term rows).
    void header(const char* line) {
        if (current_header_ == line) return;
        out_ << line << '\n';
        current_header_ = line;
    }

    Format fmt_;
    std::ostream& out_;
    std::string current_header_;
};

inline void validate_record(const search::TermRecord& rec, const std::string& where) {
    if (rec.factorization.value() != rec.value || rec.residue_mod_9 != rec.value % 9)
        throw corrupt_file_error("record does not reproduce its value at " + where);
}

// Reads term records back from `search --out` files, both formats.
inline std::vector<search::TermRecord> parse_results_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read results file: " + path);

    std::vector<search::TermRecord> records;
    std::vector<std::string> csv_columns;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);

        if (line[0] == '{') {
            const auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) throw corrupt_file_error("bad JSON at " + where);
            if (j.value("kind", "") != "term") continue;
            search::TermRecord rec;
            rec.value = j.at("value").get<u64>();
            rec.residue_mod_9 = j.at("residue_mod_9").get<unsigned>();
            const auto cls =
                search::term_class_from_string(j.value("class", std::string{}));
            if (!cls) throw corrupt_file_error("bad class at " + where);
            rec.cls = *cls;
            for (const auto& pe : j.at("factors"))
                rec.factorization.factors.push_back(
                    {pe.at(0).get<u64>(), pe.at(1).get<unsigned>()});
            validate_record(rec, where);
            records.push_back(std::move(rec));
            continue;
        }

        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (csv_columns.empty()) {
            csv_columns = cells;  // header row
            continue;
        }
        if (cells.size() != csv_columns.size())
            throw corrupt_file_error("short CSV row at " + where);
        auto field = [&](const std::string& name) -> const std::string& {
            for (std::size_t i = 0; i < csv_columns.size(); ++i)
                if (csv_columns[i] == name) return cells[i];
            throw corrupt_file_error("missing CSV column " + name + " in " + path);
        };
        if (field("kind") != "term") continue;
        search::TermRecord rec;
        rec.value = parse_u64(field("value"));
        rec.residue_mod_9 = static_cast<unsigned>(parse_u64(field("residue_mod_9")));
        const auto cls = search::term_class_from_string(field("class"));
        if (!cls) throw corrupt_file_error("bad class at " + where);
        rec.cls = *cls;
        rec.factorization = arith::factorization_from_string(field("factors"));
        validate_record(rec, where);
        records.push_back(std::move(rec));
    }
    return records;
}

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

struct SearchArgs {
    u64 lo = 0, hi = 0;
    unsigned workers = default_workers();
    std::string checkpoint;
    std::string out_path;
    u64 chunk_size = 1u << 20;
    bool no_wheel = false;
};

struct FamilyArgs {
    u64 x = 0, p = 0;
    long long i_from = 1, i_to = 1;
    bool trace = false;
    std::string cache;
};

struct TablesArgs {
    unsigned which = 0;  // 0 = all
    std::optional<u64> limit;
    unsigned workers = default_workers();
};

inline int run_check(u64 x, Emitter& em) {
    const bool hit = kernel::is_term(x);
    std::optional<search::TermClass> cls;
    if (hit) cls = search::classify(x).second;
    em.term(x, hit, static_cast<unsigned>(x % 9), cls, arith::factorize(x));
    return hit ? exit_ok : exit_not_term;
}

inline int run_search(const SearchArgs& a, Format fmt, std::ostream& out) {
    std::ofstream file;  // opened up front so a long run cannot end unwritable
    if (!a.out_path.empty()) {
        file.open(a.out_path, std::ios::trunc);
        if (!file) throw error("cannot write output file: " + a.out_path);
    }

    search::SearchOptions opt;
    opt.workers = a.workers;
    opt.chunk_size = a.chunk_size;
    opt.checkpoint_path = a.checkpoint;
    opt.use_wheel = !a.no_wheel;
    const auto records = search::search_range(a.lo, a.hi, opt);

    Emitter em(fmt, a.out_path.empty() ? out : file);
    for (const auto& rec : records)
        em.term(rec.value, true, rec.residue_mod_9, rec.cls, rec.factorization);
    return exit_ok;
}

inline int run_family(const FamilyArgs& a, Emitter& em) {
    a066364::PrimeSetCache owned_cache;
    std::optional<a066364::PrimeSetCache> file_cache;
    if (!a.cache.empty()) file_cache.emplace(a.cache);
    auto& cache = file_cache ? *file_cache : owned_cache;

    auto spec = families::decompose_term(a.x, a.p, cache);
    if (a.i_from < 0) throw domain_error("--i-from must be non-negative");
    if (a.i_from > a.i_to) throw domain_error("--i-from must not exceed --i-to");
    spec.i_from = a.i_from;
    spec.i_to = a.i_to;

    bool all_good = true;
    for (const auto& rec : families::generate_family(spec)) {
        em.family(spec, rec);
        all_good = all_good && rec.verified;
        if (a.trace) {
            const auto t = families::verify_block_sum_argument(spec, rec.i);
            em.trace(t);
            all_good = all_good && t.valid;
        }
    }
    return all_good ? exit_ok : exit_verification;
}

inline void emit_table_1(u64 limit, Emitter& em) {
    em.note("table 1: A066364 member primes up to " + std::to_string(limit));
    for (const auto& rec : a066364::scan_a066364(limit))
        em.order(rec.prime, rec.order_e, rec.n_p, true);
}

inline void emit_table_terms(unsigned which, u64 limit, unsigned workers, Emitter& em) {
    em.note("table " + std::to_string(which) + ": terms up to " +
            std::to_string(limit) + " (the published tables reach further)");
    search::SearchOptions opt;
    opt.workers = workers;
    const auto records = search::search_range(1, limit, opt);
    for (const auto& rec : records) {
        const bool wanted = which == 2
                                ? rec.value % 3 == 0 && rec.value % 9 != 0
                                : rec.value > 10 && rec.value % 3 != 0;
        if (wanted)
            em.term(rec.value, true, rec.residue_mod_9, rec.cls, rec.factorization);
    }
}

inline int run_tables(const TablesArgs& a, Emitter& em) {
    constexpr u64 default_prime_limit = 2000;
    constexpr u64 default_term_limit = 100'000'000;
    if (a.which == 0 || a.which == 1)
        emit_table_1(a.limit.value_or(default_prime_limit), em);
    if (a.which == 0 || a.which == 2)
        emit_table_terms(2, a.limit.value_or(default_term_limit), a.workers, em);
    if (a.which == 0 || a.which == 3)
        emit_table_terms(3, a.limit.value_or(default_term_limit), a.workers, em);
    return exit_ok;
}

inline int run_verify(const std::string& path, const std::string& cache_path,
                      Emitter& em) {
    const auto records = parse_results_file(path);

    a066364::PrimeSetCache owned_cache;
    std::optional<a066364::PrimeSetCache> file_cache;
    if (!cache_path.empty()) file_cache.emplace(cache_path);
    auto& cache = file_cache ? *file_cache : owned_cache;

    const search::Report reports[] = {
        search::verify_exclusions(records),
        search::verify_factor_characterization(records, cache),
        search::verify_mod9_observation(records),
    };
    bool all = true;
    for (const auto& rep : reports) {
        em.report(rep);
        all = all && rep.passed;
    }
    return all ? exit_ok : exit_verification;
}

}  // namespace detail

/// Entry point behind the `digitseq` binary; args exclude the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    using namespace detail;

    CLI::App app{"toolkit for the digit-sum divisor sequence (OEIS A342810)"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "jsonl";
    app.add_option("--format", format, "output record format")
        ->check(CLI::IsMember({"jsonl", "csv"}));

    std::string check_x;
    auto* cmd_check = app.add_subcommand("check", "membership verdict for one value");
    cmd_check->add_option("x", check_x, "candidate value")->required();

    SearchArgs sa;
    auto* cmd_search = app.add_subcommand("search", "enumerate terms in [lo, hi]");
    cmd_search->add_option("lo", sa.lo)->required();
    cmd_search->add_option("hi", sa.hi)->required();
    cmd_search->add_option("--workers", sa.workers, "worker thread count")
        ->envname("DIGITSEQ_WORKERS");
    cmd_search->add_option("--checkpoint", sa.checkpoint, "resumable progress file");
    cmd_search->add_option("--out", sa.out_path, "write records here instead of stdout");
    cmd_search->add_option("--chunk-size", sa.chunk_size, "candidates per chunk");
    cmd_search->add_flag("--no-wheel", sa.no_wheel, "disable the 2/5 skip wheel");

    std::string factor_n;
    auto* cmd_factor = app.add_subcommand("factor", "prime factorization");
    cmd_factor->add_option("n", factor_n)->required();

    std::string order_n;
    auto* cmd_order = app.add_subcommand("order", "multiplicative order of 10 mod n");
    cmd_order->add_option("n", order_n)->required();

    std::string selfone_limit;
    auto* cmd_selfone = app.add_subcommand("selfone", "solutions of 10^n = 1 (mod n)");
    cmd_selfone->add_option("limit", selfone_limit)->required();

    u64 a_limit = 2000;
    std::string a_cache;
    auto* cmd_a066364 =
        app.add_subcommand("a066364", "member primes with order records");
    cmd_a066364->add_option("--limit", a_limit, "prime bound");
    cmd_a066364->add_option("--cache", a_cache, "persistent verdict cache file");

    FamilyArgs fa;
    auto* cmd_family =
        app.add_subcommand("family", "derive terms 3^m * p^i * q from a base term");
    cmd_family->add_option("x", fa.x, "base term")->required();
    cmd_family->add_option("--prime", fa.p, "member prime p")->required();
    cmd_family->add_option("--i-from", fa.i_from, "first exponent i");
    cmd_family->add_option("--i-to", fa.i_to, "last exponent i");
    cmd_family->add_flag("--trace", fa.trace, "emit the block-digit-sum argument");
    cmd_family->add_option("--cache", fa.cache, "persistent verdict cache file");

    TablesArgs ta;
    auto* cmd_tables = app.add_subcommand("tables", "reproduce the reference tables");
    cmd_tables->add_option("which", ta.which, "1, 2 or 3 (default: all)")
        ->check(CLI::IsMember({"1", "2", "3"}));
    cmd_tables->add_option("--limit", ta.limit, "search/prime bound");
    cmd_tables->add_option("--workers", ta.workers)->envname("DIGITSEQ_WORKERS");

    std::string verify_path, verify_cache;
    auto* cmd_verify =
        app.add_subcommand("verify", "run all verifiers over stored search output");
    cmd_verify->add_option("results", verify_path, "search output file")->required();
    cmd_verify->add_option("--cache", verify_cache, "persistent verdict cache file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    Emitter em(format == "csv" ? Format::csv : Format::jsonl, out);
    try {
        if (cmd_check->parsed()) return run_check(parse_u64(check_x), em);
        if (cmd_search->parsed())
            return run_search(sa, format == "csv" ? Format::csv : Format::jsonl, out);
        if (cmd_factor->parsed()) {
            const u64 n = parse_u64(factor_n);
            em.factor_verdict(n, arith::factorize(n));
            return exit_ok;
        }
        if (cmd_order->parsed()) {
            const u64 n = parse_u64(order_n);
            const u64 e = arith::multiplicative_order_10(n);
            em.order(n, e, arith::valuation(e, 3), std::nullopt);
            return exit_ok;
        }
        if (cmd_selfone->parsed()) {
            for (u64 n : a066364::enumerate_self_one(parse_u64(selfone_limit)))
                em.self_one(n);
            return exit_ok;
        }
        if (cmd_a066364->parsed()) {
            a066364::PrimeSetCache owned;
            std::optional<a066364::PrimeSetCache> file_cache;
            if (!a_cache.empty()) file_cache.emplace(a_cache);
            for (const auto& rec :
                 a066364::scan_a066364(a_limit, file_cache ? *file_cache : owned))
                em.order(rec.prime, rec.order_e, rec.n_p, true);
            return exit_ok;
        }
        if (cmd_family->parsed()) return run_family(fa, em);
        if (cmd_tables->parsed()) return run_tables(ta, em);
        if (cmd_verify->parsed()) return run_verify(verify_path, verify_cache, em);
        err << "usage error: no subcommand\n";
        return exit_usage;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

}  // namespace digitseq::cli
