#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace sinv::cli;
    CLI::App app{"s-invariants and their Sq1 refinements"};
    app.require_subcommand(1);
    auto* compute = app.add_subcommand("compute", "compute invariants for every knot in a table");

    Job job;
    std::string mode = "s", rings = "f2", format = "csv";
    compute->add_option("--input", job.input, "knot table, one `name;code` per line")->required();
    compute->add_option("--mode", mode, "s | sq1 | kh")->check(CLI::IsMember({"s", "sq1", "kh"}));
    compute->add_option("--ring", rings, "comma-separated rings: f<p>, q");
    compute->add_option("--out", job.out, "output file (default: stdout)");
    compute->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    compute->add_option("--jobs", job.jobs, "worker threads")->check(CLI::PositiveNumber);
    compute->add_flag("--fail-fast", job.fail_fast, "stop at the first failing knot");
    compute->add_option("--dump-complex", job.dump_dir, "write each reduced complex to DIR/<knot>.<ring>.txt");
    compute->add_flag("--timings", job.timings, "add per-knot milliseconds to the output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        job.mode = parse_mode(mode);
        job.format = parse_format(format);
        job.rings = parse_rings(rings);
        auto cols = columns_for(job);
        auto result = run(job, read_input(job.input));
        if (job.out.empty()) {
            write_rows(std::cout, result.rows, cols, job.format);
            std::cerr << report(result.rows, cols);
        } else {
            std::ofstream os(job.out);
            if (!os) throw IoError("cannot write " + job.out);
            write_rows(os, result.rows, cols, job.format);
            if (!os) throw IoError("write failed: " + job.out);
            std::cout << report(result.rows, cols);
        }
        if (result.tripped) {
            std::cerr << "stopped at first failure: " << result.rows.back().name << ": " << result.rows.back().error << '\n';
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
