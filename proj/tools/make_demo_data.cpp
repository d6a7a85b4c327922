// Regenerates data/demo/routines.json from the routine template catalog.

#include "helion/error.hpp"
#include "helion/routine.hpp"
#include "helion/synth.hpp"
#include "helion/text.hpp"
#include "helion/vocabulary.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    std::string vocab_path, templates_path, out_path;
    helion::SynthConfig cfg;
    CLI::App app{"synthesize per-user routine sets from a template catalog"};
    app.add_option("--vocab", vocab_path)->required()->check(CLI::ExistingFile);
    app.add_option("--templates", templates_path)->required()->check(CLI::ExistingFile);
    app.add_option("--users", cfg.users);
    app.add_option("--seed", cfg.seed);
    app.add_option("--out", out_path)->required();
    CLI11_PARSE(app, argc, argv);

    try {
        auto vocab = helion::load_vocabulary_file(vocab_path);
        std::ifstream in(templates_path);
        auto templates = helion::load_routines(in, &vocab);
        auto users = helion::synthesize_users(templates, cfg);
        helion::write_file_atomic(out_path, helion::to_json(users).dump(2) + "\n");
        std::cout << "wrote " << users.size() << " users to " << out_path << "\n";
    } catch (const helion::Error& e) {
        std::cerr << "error: " << e.what() << " " << e.detail() << "\n";
        return 1;
    }
    return 0;
}
