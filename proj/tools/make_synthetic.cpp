// Writes the bundled demo tables: a 30-minute weather table in local time
// (+10:00) and a 5-minute farm output table in UTC.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "paretogp/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic weather/energy tables"};
    std::string dir = "data/synthetic";
    std::size_t days = 75;
    std::uint64_t seed = 2010;
    app.add_option("--dir", dir, "Output directory");
    app.add_option("--days", days, "Number of days starting 2010-10-01");
    app.add_option("--seed", seed, "Generator seed");
    CLI11_PARSE(app, argc, argv);

    const auto files = pgp::synthetic::weather({2010, 10, 1, 0, 0, 0}, days, seed);
    std::filesystem::create_directories(dir);
    std::ofstream(std::filesystem::path(dir) / "weather.csv", std::ios::binary) << files.predictors_csv;
    std::ofstream(std::filesystem::path(dir) / "energy.csv", std::ios::binary) << files.response_csv;
    std::cout << "wrote " << dir << "/weather.csv and " << dir << "/energy.csv\n";
    return 0;
}
