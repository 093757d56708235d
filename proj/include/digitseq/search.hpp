#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "digitseq/a066364.hpp"
#include "digitseq/arith.hpp"
#include "digitseq/common.hpp"
#include "digitseq/kernel.hpp"

namespace digitseq::search {

enum class TermClass { SMALL, DIV9, DIV3_ONLY, COPRIME3 };

inline const char* to_string(TermClass c) {
    switch (c) {
        case TermClass::SMALL: return "SMALL";
        case TermClass::DIV9: return "DIV9";
        case TermClass::DIV3_ONLY: return "DIV3_ONLY";
        case TermClass::COPRIME3: return "COPRIME3";
    }
    return "?";
}

inline std::optional<TermClass> term_class_from_string(std::string_view s) {
    if (s == "SMALL") return TermClass::SMALL;
    if (s == "DIV9") return TermClass::DIV9;
    if (s == "DIV3_ONLY") return TermClass::DIV3_ONLY;
    if (s == "COPRIME3") return TermClass::COPRIME3;
    return std::nullopt;
}

struct TermRecord {
    u64 value;
    arith::Factorization factorization;
    unsigned residue_mod_9;
    TermClass cls;

    friend bool operator==(const TermRecord&, const TermRecord&) = default;
};

/// Resumable progress of a range scan. Chunk c covers the candidates
/// [lo + c*chunk_size, min(hi, lo + (c+1)*chunk_size - 1)].
struct SearchCheckpoint {
    u64 lo = 0;
    u64 hi = 0;
    u64 chunk_size = 0;
    std::map<u64, std::vector<u64>> found_by_chunk;  // completed chunks only

    bool completed(u64 chunk) const { return found_by_chunk.count(chunk) != 0; }
};

struct SearchOptions {
    unsigned workers = 1;
    u64 chunk_size = 1u << 20;
    std::string checkpoint_path;          // empty: no checkpointing
    bool use_wheel = true;                // skip x > 10 divisible by 2 or 5
    std::optional<u64> stop_after_chunks; // abort mid-run, checkpoint intact
};

struct interrupted_error : error {
    explicit interrupted_error(u64 chunks)
        : error("search stopped after " + std::to_string(chunks) +
                " chunks; checkpoint is resumable") {}
};

inline void save_checkpoint(const SearchCheckpoint& ckpt, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw error("cannot write checkpoint: " + tmp);
        out << "digitseq-ckpt v1 " << ckpt.lo << ' ' << ckpt.hi << ' '
            << ckpt.chunk_size << '\n';
        for (const auto& [chunk, terms] : ckpt.found_by_chunk) {
            out << chunk;
            for (u64 t : terms) out << ' ' << t;
            out << '\n';
        }
        out.flush();
        if (!out) throw error("short write on checkpoint: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline SearchCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw corrupt_file_error("cannot read checkpoint: " + path);
    std::string header;
    if (!std::getline(in, header))
        throw corrupt_file_error("checkpoint is empty: " + path);

    SearchCheckpoint ckpt;
    {
        std::istringstream hs(header);
        std::string magic, version;
        if (!(hs >> magic >> version >> ckpt.lo >> ckpt.hi >> ckpt.chunk_size) ||
            magic != "digitseq-ckpt" || version != "v1")
            throw corrupt_file_error("bad checkpoint header: " + header);
    }

    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        u64 chunk = 0;
        if (!(ls >> chunk)) {
            if (i + 1 == lines.size()) break;  // torn trailing write
            throw corrupt_file_error("corrupt checkpoint line " +
                                     std::to_string(i + 2) + " in " + path);
        }
        std::vector<u64> terms;
        u64 t;
        while (ls >> t) terms.push_back(t);
        if (!ls.eof()) {
            if (i + 1 == lines.size()) break;
            throw corrupt_file_error("corrupt checkpoint line " +
                                     std::to_string(i + 2) + " in " + path);
        }
        ckpt.found_by_chunk[chunk] = std::move(terms);
    }
    return ckpt;
}

/// (x mod 9, class) for a verified term.
inline std::pair<unsigned, TermClass> classify(u64 x) {
    if (!kernel::is_term(x)) throw not_a_term_error(std::to_string(x));
    const unsigned r = static_cast<unsigned>(x % 9);
    TermClass cls;
    if (x <= 10)
        cls = TermClass::SMALL;
    else if (r == 0)
        cls = TermClass::DIV9;
    else if (r == 3 || r == 6)
        cls = TermClass::DIV3_ONLY;
    else
        cls = TermClass::COPRIME3;
    return {r, cls};
}

inline TermRecord make_record(u64 x) {
    const auto [r, cls] = classify(x);
    return {x, arith::factorize(x), r, cls};
}

namespace detail {

inline std::vector<u64> scan_chunk(u64 lo, u64 hi, bool use_wheel) {
    std::vector<u64> found;
    for (u64 x = lo;; ++x) {
        const bool skip = use_wheel && x > 10 && (x % 2 == 0 || x % 5 == 0);
        if (!skip && kernel::is_term(x)) found.push_back(x);
        if (x == hi) break;  // hi may be 2^64 - 1, so no x <= hi condition
    }
    return found;
}

}  // namespace detail

/// Exactly the terms in [lo, hi], ascending, each with factorization and
/// class. Output is independent of worker count and of the skip wheel.
inline std::vector<TermRecord> search_range(u64 lo, u64 hi,
                                            const SearchOptions& opt = {}) {
    if (lo == 0 || lo > hi) throw domain_error("invalid range");
    if (opt.workers == 0) throw domain_error("worker count must be positive");
    if (opt.chunk_size == 0) throw domain_error("chunk size must be positive");

    const u64 span = hi - lo + 1;
    const u64 chunks = (span + opt.chunk_size - 1) / opt.chunk_size;

    SearchCheckpoint ckpt;
    ckpt.lo = lo;
    ckpt.hi = hi;
    ckpt.chunk_size = opt.chunk_size;
    if (!opt.checkpoint_path.empty() &&
        std::filesystem::exists(opt.checkpoint_path)) {
        ckpt = load_checkpoint(opt.checkpoint_path);
        if (ckpt.lo != lo || ckpt.hi != hi || ckpt.chunk_size != opt.chunk_size)
            throw corrupt_file_error(
                "checkpoint " + opt.checkpoint_path +
                " belongs to a different search (header mismatch); remove it to restart");
    }

    std::vector<u64> pending;
    for (u64 c = 0; c < chunks; ++c)
        if (!ckpt.completed(c)) pending.push_back(c);

    std::mutex mu;  // guards ckpt, the progress counter, and first_error
    u64 done_this_run = 0;
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;

    auto worker = [&](unsigned id) {
        try {
            for (std::size_t j = id; j < pending.size(); j += opt.workers) {
                if (stop.load(std::memory_order_relaxed)) return;
                const u64 c = pending[j];
                const u64 chunk_lo = lo + c * opt.chunk_size;
                // hi may sit near 2^64; never form chunk_lo + size - 1 blindly
                const u64 chunk_hi = hi - chunk_lo < opt.chunk_size
                                         ? hi
                                         : chunk_lo + opt.chunk_size - 1;
                auto found = detail::scan_chunk(chunk_lo, chunk_hi, opt.use_wheel);

                std::lock_guard guard(mu);
                ckpt.found_by_chunk[c] = std::move(found);
                if (!opt.checkpoint_path.empty())
                    save_checkpoint(ckpt, opt.checkpoint_path);
                ++done_this_run;
                if (opt.stop_after_chunks && done_this_run >= *opt.stop_after_chunks)
                    stop.store(true, std::memory_order_relaxed);
            }
        } catch (...) {
            std::lock_guard guard(mu);
            if (!first_error) first_error = std::current_exception();
            stop.store(true, std::memory_order_relaxed);
        }
    };

    if (opt.workers == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(opt.workers);
        for (unsigned w = 0; w < opt.workers; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    if (stop.load() && ckpt.found_by_chunk.size() < chunks)
        throw interrupted_error(done_this_run);

    // Merge by chunk index; chunks are internally ascending already.
    std::vector<TermRecord> records;
    for (u64 c = 0; c < chunks; ++c)
        for (u64 x : ckpt.found_by_chunk.at(c)) records.push_back(make_record(x));
    return records;
}

struct Report {
    std::string name;
    bool passed = true;
    u64 records_checked = 0;
    std::vector<std::string> notes;
    std::vector<u64> counterexamples;
    std::vector<u64> primes_seen;  // factor-characterization: members found
};

/// No term above 10 may have a factor 2, 5, 11 or 13.
inline Report verify_exclusions(const std::vector<TermRecord>& records) {
    Report rep;
    rep.name = "exclusions";
    for (const auto& rec : records) {
        if (rec.value <= 10) continue;
        ++rep.records_checked;
        std::string hit;
        for (u64 p : {2, 5, 11, 13})
            if (rec.factorization.contains(p))
                hit += (hit.empty() ? "" : ", ") + std::to_string(p);
        if (!hit.empty()) {
            rep.passed = false;
            rep.counterexamples.push_back(rec.value);
            rep.notes.push_back(std::to_string(rec.value) +
                                " has excluded factor " + hit);
        }
    }
    rep.notes.push_back(std::to_string(rep.records_checked) +
                        " records checked against factors {2, 5, 11, 13}");
    return rep;
}

/// Every term divisible by 9 must factor entirely over A066364 member primes.
inline Report verify_factor_characterization(const std::vector<TermRecord>& records,
                                             a066364::PrimeSetCache& cache) {
    Report rep;
    rep.name = "factor-characterization";
    std::set<u64> members, rejected;
    u64 skipped = 0;
    for (const auto& rec : records) {
        if (rec.cls != TermClass::DIV9) {
            ++skipped;
            continue;
        }
        ++rep.records_checked;
        for (const auto& [p, e] : rec.factorization.factors) {
            (void)e;
            if (a066364::is_a066364_prime(p, cache)) {
                members.insert(p);
            } else {
                rejected.insert(p);
                rep.passed = false;
                rep.counterexamples.push_back(rec.value);
                rep.notes.push_back(std::to_string(rec.value) +
                                    " has non-member prime factor " +
                                    std::to_string(p));
            }
        }
    }
    rep.primes_seen.assign(members.begin(), members.end());
    std::string ms = "member primes encountered:";
    for (u64 p : members) ms += ' ' + std::to_string(p);
    rep.notes.push_back(ms);
    rep.notes.push_back(std::to_string(rep.records_checked) +
                        " DIV9 records checked, " + std::to_string(skipped) +
                        " out of claim's scope");
    return rep;
}

/// Terms coprime to 3 have residue 2 or 7 mod 9 -- an observation, not a
/// theorem. Other residues past 10^13 are findings, not failures.
inline Report verify_mod9_observation(const std::vector<TermRecord>& records) {
    constexpr u64 observed_bound = 10'000'000'000'000ULL;
    Report rep;
    rep.name = "mod9-observation";
    for (const auto& rec : records) {
        if (rec.cls != TermClass::COPRIME3) continue;
        ++rep.records_checked;
        if (rec.residue_mod_9 == 2 || rec.residue_mod_9 == 7) continue;
        if (rec.value <= observed_bound) {
            rep.passed = false;
            rep.counterexamples.push_back(rec.value);
            rep.notes.push_back(std::to_string(rec.value) + " has residue " +
                                std::to_string(rec.residue_mod_9) +
                                " inside the observed bound");
        } else {
            rep.notes.push_back("finding: " + std::to_string(rec.value) +
                                " has residue " + std::to_string(rec.residue_mod_9) +
                                " beyond the observed bound");
        }
    }
    rep.notes.push_back(std::to_string(rep.records_checked) +
                        " COPRIME3 records checked; residue {2, 7} is an "
                        "observation, not a theorem");
    return rep;
}

}  // namespace digitseq::search
