#include "covhom/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Homogenization experiments for Hamiltonians on abelian covers"};
    covhom::RunOptions opt;
    std::string out_dir;
    int threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--config", opt.config_path, "scenario file (JSON)")->required();
    app.add_option("--command", opt.command, "alpha, beta, homogenize, subcover, spaces or validate")->required();
    auto* out_opt = app.add_option("--out-dir", out_dir, "overrides output.dir");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads");
    auto* seed_opt = app.add_option("--seed-override", seed, "replaces experiment.seed");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : covhom::kExitSchema;
    }
    if (*out_opt) opt.out_dir = out_dir;
    if (*threads_opt) opt.threads = threads;
    if (*seed_opt) opt.seed = seed;

    const covhom::RunResult r = covhom::run(opt);
    if (!r.summary.empty()) std::cout << r.summary << (r.summary.back() == '\n' ? "" : "\n");
    for (const auto& a : r.artifacts) std::cout << "wrote " << a << '\n';
    if (!r.errors.empty()) std::cerr << covhom::errors_json(r.errors);
    std::cout << (r.exit_code == covhom::kExitPass ? "PASS" : "FAIL") << " (exit " << r.exit_code << ")\n";
    return r.exit_code;
}
