#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "caa/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value, win over the config file
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_path, "JSON run configuration")->required();
    cmd->add_option("-s,--set", args.overrides, "override a config key (key=value, repeatable)");
}

caa::RunConfig resolve(const CommonArgs& args) {
    caa::RunConfig cfg = caa::load_config(args.config_path);
    for (const auto& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw caa::UsageError("override must be key=value: '" + kv + "'");
        caa::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-affiliation network and citation-impact analysis pipeline"};
    app.require_subcommand(1);

    struct Stage {
        const char* name;
        const char* help;
        int (*run)(const caa::RunConfig&);
    };
    const Stage stages[] = {
        {"validate", "Check inputs and report unresolved affiliations", caa::cmd_validate},
        {"links", "Generate CoAffAll and CoAffStable link sets", caa::cmd_links},
        {"network", "Build organisation networks from link files", caa::cmd_network},
        {"gravity", "Fit zero-inflated negative binomial gravity models", caa::cmd_gravity},
        {"impact", "Compute citation-impact scores, series and rankings", caa::cmd_impact},
        {"report", "Run all stages and write the run manifest", caa::cmd_report},
    };

    CommonArgs args;
    int exit_code = 0;
    for (const auto& stage : stages) {
        CLI::App* cmd = app.add_subcommand(stage.name, stage.help);
        add_common(cmd, args);
        cmd->callback([&args, &exit_code, run = stage.run] {
            try {
                exit_code = run(resolve(args));
            } catch (const caa::UsageError& e) {
                std::cerr << e.what() << '\n';
                exit_code = 1;
            }
        });
    }

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
