#pragma once

// Command-line surface. Subcommands:
//   aggregate  stream rankings through the engine, print the final winner
//   generate   materialize a synthetic stream to the rankings text format
//   evaluate   price candidate aggregations against a stored domain
//   bench      run an experiment grid, one engine per cell, CSV report
//   grades     turn a grade matrix into per-lesson rankings or a GPA ranking
//
// Exit codes: 0 success, 2 parse or configuration error, 3 oracle size guard,
// 4 internal failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rankagg/aggregator.hpp"
#include "rankagg/core.hpp"
#include "rankagg/domain_gen.hpp"
#include "rankagg/oracles.hpp"
#include "rankagg/text_io.hpp"

namespace rankagg::cli {

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

namespace detail {

// Largest padded universe the cubic assignment oracle will accept.
constexpr std::int32_t kOracleGuard = 1024;

constexpr const char* kBenchHeader =
    "model,n,m,seed,cost_opt,cost_lr,cost_pap,cost_bir,alpha_lr,alpha_pap,alpha_bir,push_mean_us,total_ms";

inline TiePolicy parse_tie_policy(const std::string& name) {
    if (name == "select") return TiePolicy::Select;
    if (name == "sort") return TiePolicy::Sort;
    fail(Errc::ParseError, "unknown tie policy '" + name + "'");
}

inline GenModel parse_model(const std::string& name) {
    if (name == "uniform") return GenModel::Uniform;
    if (name == "biased") return GenModel::Biased;
    if (name == "mallows") return GenModel::Mallows;
    fail(Errc::ParseError, "unknown model '" + name + "'");
}

inline const char* winner_name(Winner w) { return w == Winner::LR ? "LR" : "PAP"; }

inline std::string format_alpha(std::int64_t cost, std::int64_t opt) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << static_cast<double>(cost) / static_cast<double>(opt);
    return s.str();
}

class OutputFile {
public:
    OutputFile(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path);
            if (!file_) fail(Errc::ParseError, "cannot open output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

class InputFile {
public:
    InputFile(const std::string& path, std::istream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_.open(path);
            if (!file_) fail(Errc::ParseError, "cannot open input file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::istream& get() { return *stream_; }

private:
    std::ifstream file_;
    std::istream* stream_ = nullptr;
};

inline unsigned thread_budget(std::size_t work_items) {
    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("RANKAGG_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) threads = static_cast<unsigned>(parsed);
    }
    if (threads == 0) threads = 1;
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work_items, 1)));
}

struct AggregateArgs {
    std::string input = "-";
    std::uint64_t seed = 0;
    bool emit_each = false;
    std::string tie_policy = "select";
};

inline int cmd_aggregate(const AggregateArgs& args, Streams io) {
    InputFile input(args.input, io.in);
    Aggregator::Config config{args.seed, parse_tie_policy(args.tie_policy)};

    std::optional<Aggregator> engine;
    std::string line;
    std::int64_t line_no = 0;
    if (args.emit_each) io.out << "m,lr_cost,pap_cost,winner\n";
    while (std::getline(input.get(), line)) {
        ++line_no;
        if (!line.empty() && line[0] == '#') continue;
        const auto tokens = split_ranking_line(line);
        if (tokens.empty()) continue;
        try {
            if (!engine) engine.emplace(SymbolTable::intern(tokens), config);
            const StepResult& step = engine->push(tokens);
            if (args.emit_each)
                io.out << step.m << ',' << step.lr_cost << ',' << step.pap_cost << ','
                       << winner_name(step.winner) << '\n';
        } catch (const Error& e) {
            fail(Errc::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!engine) fail(Errc::ParseError, "no rankings found in input");
    write_ranking_line(io.out, engine->current().best);
    return 0;
}

struct GenerateArgs {
    std::string model = "uniform";
    std::int32_t n = 0;
    std::int64_t m = 0;
    std::uint64_t seed = 1;
    std::optional<std::int64_t> k;
    std::optional<double> phi;
    bool fixed_pairs = false;
    std::string out = "-";
};

inline GenSpec to_spec(const GenerateArgs& args) {
    GenSpec spec;
    spec.model = parse_model(args.model);
    spec.n = args.n;
    spec.m = args.m;
    spec.seed = args.seed;
    spec.k = args.k;
    spec.phi = args.phi;
    spec.redraw_pairs_each_ranking = !args.fixed_pairs;
    return spec;
}

inline int cmd_generate(const GenerateArgs& args, Streams io) {
    DomainGenerator gen(to_spec(args));
    OutputFile out(args.out, io.out);
    while (auto ranking = gen.next()) write_ranking_line(out.get(), *ranking);
    return 0;
}

struct EvaluateArgs {
    std::string domain = "-";
    std::vector<std::string> candidates = {"lr", "pap", "opt"};
    std::uint64_t seed = 0;
    std::string tie_policy = "select";
    std::string out = "-";
};

inline int cmd_evaluate(const EvaluateArgs& args, Streams io) {
    InputFile input(args.domain, io.in);
    ParsedRankings parsed = parse_rankings_text(input.get());
    Domain domain(parsed.table);
    for (auto& r : parsed.rankings) domain.add(std::move(r));

    const bool wants_opt = std::find(args.candidates.begin(), args.candidates.end(), "opt") !=
                           args.candidates.end();
    const bool wants_engine =
        std::find_if(args.candidates.begin(), args.candidates.end(),
                     [](const std::string& c) { return c == "lr" || c == "pap"; }) != args.candidates.end();

    RankForest forest(domain.table->padded_count(), domain.table->padded_count());
    for (const Ranking& r : domain.rankings) forest.absorb(r);

    std::optional<Aggregator> engine;
    if (wants_engine) {
        engine.emplace(domain.table, Aggregator::Config{args.seed, parse_tie_policy(args.tie_policy)});
        for (const Ranking& r : domain.rankings) engine->push(r);
    }
    std::optional<std::int64_t> opt_cost;
    if (wants_opt) {
        if (domain.table->padded_count() > kOracleGuard)
            fail(Errc::OracleTooLarge, "assignment oracle is limited to " + std::to_string(kOracleGuard) +
                                           " elements");
        opt_cost = optimal_footrule(domain).cost;
    }

    OutputFile out_file(args.out, io.out);
    std::ostream& out = out_file.get();
    out << "candidate,cost,alpha\n";
    for (const std::string& name : args.candidates) {
        std::optional<std::int64_t> cost;
        if (name == "lr") {
            cost = engine->current().lr_cost;
        } else if (name == "pap") {
            cost = engine->current().pap_cost;
        } else if (name == "opt") {
            cost = *opt_cost;
        } else if (name == "bir") {
            std::int64_t best = forest.distance(domain.rankings.front());
            for (const Ranking& r : domain.rankings) best = std::min(best, forest.distance(r));
            cost = best;
        } else if (name == "median") {
            if (auto median = median_position_aggregation(domain)) cost = forest.distance(*median);
        } else if (name == "average") {
            cost = forest.distance(mean_position_aggregation(domain));
        } else {
            InputFile candidate_file(name, io.in);
            std::string line;
            std::int64_t line_no = 0;
            while (std::getline(candidate_file.get(), line)) {
                ++line_no;
                if (!line.empty() && line[0] == '#') continue;
                const auto tokens = split_ranking_line(line);
                if (tokens.empty()) continue;
                try {
                    cost = forest.distance(Ranking::from_labels(domain.table, tokens));
                } catch (const Error& e) {
                    fail(Errc::ParseError, name + " line " + std::to_string(line_no) + ": " + e.what());
                }
                break;
            }
            if (!cost) fail(Errc::ParseError, "candidate file '" + name + "' holds no ranking");
        }
        out << name << ',';
        if (cost) out << *cost;
        else out << "NA";
        out << ',';
        if (cost && opt_cost) out << format_alpha(*cost, *opt_cost);
        else out << "NA";
        out << '\n';
    }
    return 0;
}

struct BenchArgs {
    std::vector<std::string> models = {"uniform"};
    std::vector<std::int32_t> ns = {64};
    std::vector<std::int64_t> ms = {1000};
    std::int64_t seed_count = 1;
    std::uint64_t seed_base = 1;
    std::optional<std::int64_t> k;
    std::optional<double> phi;
    std::string tie_policy = "select";
    std::string out = "-";
};

struct BenchCell {
    GenModel model;
    std::string model_name;
    std::int32_t n;
    std::int64_t m;
    std::uint64_t seed;
};

struct BenchRow {
    std::int64_t opt = 0, lr = 0, pap = 0, bir = 0;
    double push_mean_us = 0.0, total_ms = 0.0;
};

inline BenchRow run_bench_cell(const BenchCell& cell, const BenchArgs& args, TiePolicy policy) {
    GenSpec spec;
    spec.model = cell.model;
    spec.n = cell.n;
    spec.m = cell.m;
    spec.seed = cell.seed;
    if (cell.model == GenModel::Biased) spec.k = args.k.value_or(cell.n);
    if (cell.model == GenModel::Mallows) spec.phi = args.phi.value_or(0.9);
    DomainGenerator gen(spec);
    if (gen.table()->padded_count() > kOracleGuard)
        fail(Errc::OracleTooLarge, "assignment oracle is limited to " + std::to_string(kOracleGuard) +
                                       " elements");

    Domain domain(gen.table());
    Aggregator engine(gen.table(), Aggregator::Config{cell.seed, policy});

    const auto wall_start = std::chrono::steady_clock::now();
    std::chrono::nanoseconds push_total{0};
    while (auto ranking = gen.next()) {
        domain.add(*ranking);
        const auto t0 = std::chrono::steady_clock::now();
        engine.push(*ranking);
        push_total += std::chrono::steady_clock::now() - t0;
    }
    const auto wall_total = std::chrono::steady_clock::now() - wall_start;

    BenchRow row;
    row.lr = engine.current().lr_cost;
    row.pap = engine.current().pap_cost;
    row.bir = engine.rank_forest().distance(domain.rankings.front());
    for (const Ranking& r : domain.rankings)
        row.bir = std::min(row.bir, engine.rank_forest().distance(r));
    row.opt = optimal_footrule(domain).cost;
    row.push_mean_us =
        std::chrono::duration<double, std::micro>(push_total).count() / static_cast<double>(cell.m);
    row.total_ms = std::chrono::duration<double, std::milli>(wall_total).count();
    return row;
}

inline int cmd_bench(const BenchArgs& args, Streams io) {
    const TiePolicy policy = parse_tie_policy(args.tie_policy);
    std::vector<BenchCell> cells;
    for (const std::string& model_name : args.models) {
        const GenModel model = parse_model(model_name);
        for (std::int32_t n : args.ns)
            for (std::int64_t m : args.ms)
                for (std::int64_t s = 0; s < args.seed_count; ++s)
                    cells.push_back({model, model_name, n, m, args.seed_base + static_cast<std::uint64_t>(s)});
    }

    std::vector<BenchRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures;
    std::mutex failure_mutex;
    const unsigned threads = thread_budget(cells.size());
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                try {
                    rows[i] = run_bench_cell(cells[i], args, policy);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    failures.push_back(std::current_exception());
                    return;
                }
            }
        });
    }
    for (auto& worker : workers) worker.join();
    if (!failures.empty()) std::rethrow_exception(failures.front());

    OutputFile out_file(args.out, io.out);
    std::ostream& out = out_file.get();
    out << kBenchHeader << '\n';
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const BenchCell& cell = cells[i];
        const BenchRow& row = rows[i];
        out << cell.model_name << ',' << cell.n << ',' << cell.m << ',' << cell.seed << ',' << row.opt
            << ',' << row.lr << ',' << row.pap << ',' << row.bir << ',' << format_alpha(row.lr, row.opt)
            << ',' << format_alpha(row.pap, row.opt) << ',' << format_alpha(row.bir, row.opt) << ','
            << std::fixed << std::setprecision(6) << row.push_mean_us << ',' << row.total_ms << '\n';
    }
    return 0;
}

struct GradesArgs {
    std::string input = "-";
    std::string mode;
    std::string out = "-";
};

inline int cmd_grades(const GradesArgs& args, Streams io) {
    if (args.mode != "rankings" && args.mode != "average")
        fail(Errc::ParseError, "mode must be 'rankings' or 'average'");
    InputFile input(args.input, io.in);
    const GradeTable table = parse_grades_csv(input.get());
    const std::size_t students = table.students.size();

    OutputFile out_file(args.out, io.out);
    std::ostream& out = out_file.get();
    out << "# ties broken by grade-table row order\n";

    auto ranking_by = [&](auto&& key) {
        std::vector<std::size_t> order(students);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
        return order;
    };
    auto emit = [&](const std::vector<std::size_t>& order) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i) out << ' ';
            out << table.students[order[i]];
        }
        out << '\n';
    };

    if (args.mode == "rankings") {
        for (std::size_t lesson = 0; lesson < table.lessons.size(); ++lesson) {
            out << "# lesson " << table.lessons[lesson] << '\n';
            emit(ranking_by([&](std::size_t s) { return table.grades[s][lesson]; }));
        }
    } else {
        emit(ranking_by([&](std::size_t s) {
            double sum = 0.0;
            for (double g : table.grades[s]) sum += g;
            return sum;
        }));
    }
    return 0;
}

}  // namespace detail

inline int run(std::vector<std::string> args, Streams io) {
    CLI::App app{"streaming footrule rank aggregation"};
    app.require_subcommand(1);

    detail::AggregateArgs aggregate_args;
    auto* aggregate = app.add_subcommand("aggregate", "stream rankings through the engine");
    aggregate->add_option("--input,-i", aggregate_args.input, "rankings text file, '-' for stdin");
    aggregate->add_option("--seed", aggregate_args.seed, "reservoir seed");
    aggregate->add_flag("--emit-each", aggregate_args.emit_each, "print per-step CSV");
    aggregate->add_option("--tie-policy", aggregate_args.tie_policy, "select|sort");

    detail::GenerateArgs generate_args;
    auto* generate = app.add_subcommand("generate", "write a synthetic ranking stream");
    generate->add_option("--model", generate_args.model, "uniform|biased|mallows")->required();
    generate->add_option("--n", generate_args.n, "universe size")->required();
    generate->add_option("--m", generate_args.m, "number of rankings")->required();
    generate->add_option("--seed", generate_args.seed, "generator seed");
    std::int64_t k_value = 0;
    auto* k_opt = generate->add_option("--k", k_value, "biased: pair alignments per ranking");
    double phi_value = 0.0;
    auto* phi_opt = generate->add_option("--phi", phi_value, "mallows: dispersion in (0,1]");
    generate->add_flag("--fixed-pairs", generate_args.fixed_pairs,
                       "biased: draw the pair set once for the whole stream");
    generate->add_option("--out,-o", generate_args.out, "output file, '-' for stdout");

    detail::EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "price candidates against a domain");
    evaluate->add_option("--domain", evaluate_args.domain, "rankings text file")->required();
    evaluate->add_option("--candidates", evaluate_args.candidates,
                         "lr, pap, bir, opt, median, average, or ranking file paths")
        ->delimiter(',');
    evaluate->add_option("--seed", evaluate_args.seed, "reservoir seed for lr/pap");
    evaluate->add_option("--tie-policy", evaluate_args.tie_policy, "select|sort");
    evaluate->add_option("--out,-o", evaluate_args.out, "output file");

    detail::BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "experiment grid, CSV report");
    bench->add_option("--models", bench_args.models, "models to run")->delimiter(',');
    bench->add_option("--n", bench_args.ns, "universe sizes")->delimiter(',');
    bench->add_option("--m", bench_args.ms, "stream lengths")->delimiter(',');
    bench->add_option("--seeds", bench_args.seed_count, "number of seeds per cell");
    bench->add_option("--seed", bench_args.seed_base, "first seed");
    std::int64_t bench_k = 0;
    auto* bench_k_opt = bench->add_option("--k", bench_k, "biased: pair alignments (default n)");
    double bench_phi = 0.0;
    auto* bench_phi_opt = bench->add_option("--phi", bench_phi, "mallows: dispersion (default 0.9)");
    bench->add_option("--tie-policy", bench_args.tie_policy, "select|sort");
    bench->add_option("--out,-o", bench_args.out, "output file");

    detail::GradesArgs grades_args;
    auto* grades = app.add_subcommand("grades", "grade matrix to rankings");
    grades->add_option("--input,-i", grades_args.input, "grades CSV file");
    grades->add_option("--mode", grades_args.mode, "rankings|average")->required();
    grades->add_option("--out,-o", grades_args.out, "output file");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            io.out << app.help();
            return 0;
        }
        io.err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*aggregate) return detail::cmd_aggregate(aggregate_args, io);
        if (*generate) {
            if (*k_opt) generate_args.k = k_value;
            if (*phi_opt) generate_args.phi = phi_value;
            return detail::cmd_generate(generate_args, io);
        }
        if (*evaluate) return detail::cmd_evaluate(evaluate_args, io);
        if (*bench) {
            if (*bench_k_opt) bench_args.k = bench_k;
            if (*bench_phi_opt) bench_args.phi = bench_phi;
            return detail::cmd_bench(bench_args, io);
        }
        if (*grades) return detail::cmd_grades(grades_args, io);
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case Errc::ParseError:
            case Errc::NotAPermutation:
            case Errc::DuplicateLabel:
            case Errc::EmptyUniverse:
            case Errc::PhiOutOfRange:
            case Errc::NonNumericGrade:
            case Errc::RaggedRows:
                return 2;
            case Errc::OracleTooLarge:
                return 3;
            default:
                return 4;
        }
    } catch (const std::exception& e) {
        io.err << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), Streams{std::cin, std::cout, std::cerr});
}

}  // namespace rankagg::cli
