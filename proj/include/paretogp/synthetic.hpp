#pragma once

/// @file synthetic.hpp
/// @brief Seeded synthetic datasets with known generating functions, used by
/// the benchmarks and the bundled demo project.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "data_pipeline.hpp"
#include "dataset.hpp"
#include "fitness.hpp"
#include "text.hpp"

namespace pgp::synthetic {

/// y = -25.2334 + 3.21666 * x, x ~ U[0, 70], Gaussian noise with standard
/// deviation `noise` times the clean response's standard deviation.
inline AlignedDataset linear(std::size_t n, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, 70.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> clean;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        rows.push_back({x});
        clean.push_back(-25.2334 + 3.21666 * x);
    }
    const double sd = moments(clean).stddev;
    for (auto& y : clean) y += noise * sd * gauss(rng);
    return make_dataset({"windGust2"}, rows, clean);
}

/// Sixteen inputs in two correlated blocks (even and odd indices share a
/// latent factor; within-block correlation about 0.56). The response depends
/// on x2 and x5 only: y = 2*x2 + 1.5*x5^2 plus 5% noise.
inline constexpr std::size_t kDriverA = 2;
inline constexpr std::size_t kDriverB = 5;

inline AlignedDataset correlated_drivers(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        const double za = gauss(rng), zb = gauss(rng);
        std::vector<double> x(16);
        for (std::size_t k = 0; k < 16; ++k) x[k] = 0.75 * (k % 2 == 0 ? za : zb) + 0.66 * gauss(rng);
        y.push_back(2.0 * x[kDriverA] + 1.5 * x[kDriverB] * x[kDriverB]);
        rows.push_back(std::move(x));
    }
    const double sd = moments(y).stddev;
    for (auto& v : y) v += 0.05 * sd * gauss(rng);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < 16; ++k) names.push_back("x" + std::to_string(k));
    return make_dataset(names, rows, y);
}

/// Saturating power curve y = 140 / (1 + exp(-(x - 35) / 7)) with 2% noise,
/// x ~ U[lo, hi].
inline AlignedDataset power_curve(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo, hi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = ux(rng);
        rows.push_back({x});
        y.push_back(140.0 / (1.0 + std::exp(-(x - 35.0) / 7.0)) + 0.02 * 140.0 * gauss(rng));
    }
    return make_dataset({"windGust2"}, rows, y);
}

/// Text of a weather table (30-minute cadence, local time +10:00,
/// day-first timestamps) and a farm-output table (5-minute cadence, UTC).
struct WeatherFiles {
    std::string predictors_csv;
    std::string response_csv;
};

inline constexpr const char* kWeatherTimestampFormat = "%d/%m/%Y %H:%M";
inline constexpr const char* kEnergyTimestampFormat = "%Y-%m-%d %H:%M:%S";

/// Clean output of the demo farm: driven by windGust2 and dewPoint only.
inline double farm_output(double wind_gust2, double dew_point) {
    const double curve = 140.0 / (1.0 + std::exp(-(wind_gust2 - 40.0) / 9.0));
    return std::clamp(curve * (1.0 - 0.025 * (dew_point - 8.0)), 0.0, 140.0);
}

/// `days` days of synthetic weather starting at local midnight of `start`.
/// Includes an 80%-missing pressureMSL column, a text windDirection column,
/// duplicated rows, and gaps in the output series.
inline WeatherFiles weather(CivilTime start, std::size_t days, std::uint64_t seed) {
    constexpr int kLocalOffset = 600;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const char* dirs[] = {"N", "NNE", "NE", "E", "SE", "S", "SW", "WSW", "W", "WNW", "NW", "CALM"};

    std::ostringstream wx, en;
    wx << "timestamp,temperature,apparentTemperature,dewPoint,relativeHumidity,wetBulbDepression,windSpeed,"
          "windGust,windSpeed2,windGust2,pressureQNH,rainSince9am,pressureMSL,windDirection\n";
    en << "time,energy\n";

    auto num = [](double v, int digits) {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(digits);
        s << v;
        return s.str();
    };

    const std::int64_t t0 = to_utc_seconds(start, kLocalOffset);
    const std::size_t steps = days * 48;
    double wind = 0.0, gust_extra = 0.0, dew = 8.0, temp_anom = 0.0, press = 1013.0, rain = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::int64_t t = t0 + static_cast<std::int64_t>(s) * 1800;
        const auto c = to_civil(t, kLocalOffset);
        wind = 0.97 * wind + 0.25 * g(rng);
        gust_extra = 0.6 * gust_extra + 0.8 * g(rng);
        dew = std::clamp(8.0 + 0.98 * (dew - 8.0) + 0.35 * g(rng), -3.0, 19.0);
        temp_anom = 0.95 * temp_anom + 0.3 * g(rng);
        press = std::clamp(1013.0 + 0.99 * (press - 1013.0) + 0.6 * g(rng), 988.0, 1037.0);
        if (c.hour == 9 && c.minute == 0) rain = 0.0;
        if (u(rng) < 0.03) rain += 2.0 * u(rng);

        const double speed = std::max(0.0, 28.0 + 14.0 * wind + 3.0 * g(rng));
        const double gust = speed * 1.3 + std::abs(3.0 * g(rng));
        const double speed2 = std::max(0.0, 0.54 * speed + 2.0 * g(rng));
        const double gust2 = std::clamp(0.54 * gust + 6.0 * gust_extra, 0.0, 75.0);
        const double diurnal = 4.0 * std::sin((static_cast<double>(c.hour) - 9.0) / 24.0 * 2.0 * 3.14159265358979);
        const double temperature = dew + 4.0 + std::abs(2.0 * temp_anom + diurnal);
        const double depression = (temperature - dew) / 3.0 + 0.4 * g(rng);
        const double humidity = std::clamp(100.0 - 5.0 * (temperature - dew) + 3.0 * g(rng), 40.0, 100.0);
        const double apparent = temperature - 0.2 * speed + 1.5 * g(rng);

        std::string line = format_timestamp(t, kWeatherTimestampFormat, kLocalOffset) + "," + num(temperature, 1) + "," +
                           num(apparent, 1) + "," + num(dew, 1) + "," + num(humidity, 0) + "," +
                           num(std::max(0.0, depression), 1) + "," + num(speed, 0) + "," + num(gust, 0) + "," +
                           num(speed2, 0) + "," + num(gust2, 0) + "," + num(press, 1) + "," + num(rain, 1) + "," +
                           (u(rng) < 0.8 ? std::string("-") : num(press - 0.4, 1)) + "," +
                           dirs[static_cast<std::size_t>(u(rng) * 12.0) % 12] + "\n";
        if (u(rng) < 0.01) {
            line = format_timestamp(t, kWeatherTimestampFormat, kLocalOffset) + ",,,,,,,,,,,,-,W\n";
        }
        wx << line;
        if (u(rng) < 0.02) wx << line;  // duplicated timestamp

        const double level = farm_output(std::round(gust2), std::round(dew * 10.0) / 10.0);
        for (int k = 0; k < 6; ++k) {
            if (u(rng) < 0.03) continue;  // missing sample
            const double v = std::clamp(level + 1.5 * g(rng), 0.0, 140.0);
            en << format_timestamp(t + k * 300, kEnergyTimestampFormat, 0) << "," << num(v, 2) << "\n";
        }
    }
    return {wx.str(), en.str()};
}

}  // namespace pgp::synthetic
