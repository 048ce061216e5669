// Writes a synthetic four-level dataset (roster.csv, events.csv) for demos and fixtures.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stratanet/ingest.hpp"
#include "stratanet/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic four-level dataset"};
    std::string out_dir;
    std::uint64_t seed = 1;
    stratanet::synthetic::FourLevelConfig config;
    app.add_option("out_dir", out_dir, "Directory for roster.csv and events.csv")->required();
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("--organizations", config.organizations, "Number of organizations");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto data = stratanet::synthetic::four_level(config, seed);
        std::filesystem::create_directories(out_dir);
        std::ofstream roster(std::filesystem::path(out_dir) / "roster.csv", std::ios::binary);
        stratanet::write_roster_csv(roster, data.roster);
        std::ofstream events(std::filesystem::path(out_dir) / "events.csv", std::ios::binary);
        stratanet::write_events_csv(events, data.events);
        std::cout << data.roster.size() << " accounts, " << data.events.size() << " events\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
