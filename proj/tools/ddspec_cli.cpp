// ddspec command-line front end.
//
// Exit codes: 0 success, 2 bad config or usage, 3 numerical failure,
// 4 verify found a disagreement.

#include <chrono>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace {

using namespace ddspec;
using namespace ddspec::cli;

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out_dir;
    std::string format = "csv";
};

using Handler = json (*)(RunContext&);

/// Maps an exception to its exit code and a one-line diagnostic.
int classify(std::exception_ptr ep, std::string& msg) {
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        msg = e.what();
        return 2;
    } catch (const InvalidArgument& e) {
        msg = std::string("invalid argument: ") + e.what();
        return 2;
    } catch (const PreconditionViolation& e) {
        msg = std::string("precondition: ") + e.what();
        return 2;
    } catch (const nlohmann::json::exception& e) {
        msg = std::string("config: ") + e.what();
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        msg = e.what();
        return 2;
    } catch (const Error& e) {
        msg = std::string("numerical failure: ") + e.what();
        return 3;
    } catch (const std::exception& e) {
        msg = e.what();
        return 3;
    }
}

int run(const std::string& name, Handler handler, const CommonOptions& o) {
    const auto start = std::chrono::steady_clock::now();
    json cfg = load_config(o.config);
    if (o.seed) cfg["seed"] = *o.seed;
    if (cfg.contains("seed") && !(cfg["seed"].is_number_unsigned() || (cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0)))
        throw ConfigError("field 'seed': expected a nonnegative integer");
    const std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
    cfg["seed"] = seed;

    const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::filesystem::path out_dir = o.out_dir.empty() ? std::filesystem::path("out") / name : std::filesystem::path(o.out_dir);
    RunOutputs out(out_dir, o.format == "json" ? Format::Json : Format::Csv);

    RunContext ctx;
    ctx.config = cfg;
    ctx.config_dir = std::filesystem::absolute(o.config).parent_path();
    ctx.seed = seed;
    ctx.threads = threads;
    ctx.out = &out;

    ManifestInfo m;
    m.command = name;
    m.config_path = o.config;
    m.config_digest = digest_string(cfg.dump());
    m.seed = seed;
    m.threads = threads;
    m.format = out.format();
    int code = 0;
    try {
        m.summary = handler(ctx);
        if (m.summary.value("verdict", "PASS") == "FAIL") code = 4;
    } catch (...) {
        std::string ignored;
        m.exit_code = classify(std::current_exception(), ignored);
        m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_manifest(out_dir, m, out.files());
        throw;
    }
    m.exit_code = code;
    m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out_dir, m, out.files());
    std::cout << "wrote " << out.files().size() + 1 << " files to " << out_dir.string() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical-decoupling noise spectroscopy of trapped-atom ensembles"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions opts;
    struct Entry {
        const char* name;
        const char* help;
        Handler handler;
    };
    const Entry entries[] = {
        {"simulate-bath", "Simulate the trapped-atom bath and estimate its spectrum", cmd_simulate_bath},
        {"filter", "Tabulate the filter function of a pulse sequence or drive", cmd_filter},
        {"predict", "Predict coherence curves and times from a bath spectrum", cmd_predict},
        {"measure-spectrum", "Run the spectroscopy protocol on a simulated bath", cmd_measure_spectrum},
        {"verify", "Compare Monte Carlo decay rates with the overlap prediction", cmd_verify},
    };
    std::vector<std::pair<CLI::App*, Handler>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", opts.config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "Override the config seed");
        sub->add_option("--threads", opts.threads, "Worker threads (default: hardware concurrency)")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--out-dir", opts.out_dir, "Output directory (default: out/<command>)");
        sub->add_option("--format", opts.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
        subs.emplace_back(sub, e.handler);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        for (const auto& [sub, handler] : subs)
            if (sub->parsed()) return run(sub->get_name(), handler, opts);
    } catch (...) {
        std::string msg;
        const int code = classify(std::current_exception(), msg);
        std::cerr << "error: " << msg << '\n';
        return code;
    }
    return 2;
}
