// Command-line driver: spectrum, evolve and ensemble subcommands.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 1 anything else (I/O, unexpected exceptions).

#include <exception>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "spinbill/commands.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

int classify(const std::exception_ptr& ep)
{
    try {
        std::rethrow_exception(ep);
    } catch (const spinbill::config_error&) {
        return exit_config;
    } catch (const spinbill::numeric_failure&) {
        return exit_numeric;
    } catch (const spinbill::degenerate_input&) {
        return exit_numeric;
    } catch (const spinbill::ensemble_failure& e) {
        return e.cause() ? classify(e.cause()) : 1;
    } catch (const std::invalid_argument&) {
        return exit_config;
    } catch (...) {
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-excitation XX dynamics on lattice billiards"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::string mask_file;
    unsigned workers = 1;

    for (const char* name : {"spectrum", "evolve", "ensemble"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value run configuration");
        sub->add_option("--output-dir", output_dir, "overrides output_dir from the config");
        sub->add_option("--mask-file", mask_file, "custom billiard mask; implies shape = custom");
        sub->add_option("--workers", workers, "concurrent realizations (0 = all cores)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        spinbill::RunConfig cfg = config_path.empty() ? spinbill::RunConfig{} : spinbill::load_config(config_path);
        if (!output_dir.empty())
            cfg.output_dir = output_dir;
        if (!mask_file.empty()) {
            cfg.shape = spinbill::ShapeTag::custom;
            cfg.mask_file = mask_file;
        }

        if (command == "spectrum") {
            const auto r = spinbill::cmd_spectrum(cfg, &std::cerr);
            if (r.spectrum->ks)
                std::cout << "best fit: " << spinbill::to_string(r.spectrum->ks->best()) << '\n';
        } else if (command == "evolve") {
            spinbill::cmd_evolve(cfg, &std::cerr);
        } else {
            spinbill::cmd_ensemble(cfg, workers, &std::cerr);
        }
        std::cout << "wrote " << command << " outputs to " << cfg.output_dir << '\n';
    } catch (const std::exception& e) {
        std::cerr << "spinbill " << command << ": " << e.what() << '\n';
        return classify(std::current_exception());
    }
    return 0;
}
