// SPDX-License-Identifier: Apache-2.0
#pragma once

// Study reports: per-axis measurements plus pass/fail verdicts, each tied to one
// numbered acceptance criterion. Written as JSON, with a CSV of the rows.

#include "vcwos/io/json.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace vcwos {

inline const char* criterion_name(int criterion) {
    switch (criterion) {
        case 1: return "kernel identity";
        case 2: return "off-centered exactness at center";
        case 3: return "gradient kernels";
        case 4: return "sampling correctness";
        case 5: return "unbiasedness";
        case 6: return "Monte Carlo rate";
        case 7: return "epsilon-shell bias";
        case 8: return "distance-query trends";
        case 9: return "weight window";
        case 10: return "gradient estimator";
        case 11: return "transform algebra";
        case 12: return "determinism";
    }
    return "unknown";
}

struct Verdict {
    int criterion = 0;
    std::string check;
    bool passed = false;
    std::string detail;
};

/// One measurement along the study axis (N, epsilon, sigma shift, step h, or point index).
struct StudyRow {
    std::string series;
    double axis = 0.0;
    std::string point;
    std::uint64_t samples = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();
    double error = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double standard_error = std::numeric_limits<double>::quiet_NaN();
    double mean_steps = 0.0;
    double mean_queries = 0.0;
    double wall_time = 0.0;
    std::map<std::string, double> extra;
};

struct StudyReport {
    std::string study;
    std::string problem;
    std::string axis;
    std::uint64_t seed = 0;
    io::Json config = io::Json::object();
    std::vector<StudyRow> rows;
    std::vector<Verdict> verdicts;

    bool passed() const {
        for (const auto& v : verdicts) {
            if (!v.passed) {
                return false;
            }
        }
        return !verdicts.empty();
    }

    void verdict(int criterion, std::string check, bool passed, std::string detail) {
        verdicts.push_back({criterion, std::move(check), passed, std::move(detail)});
    }

    /// Verdicts of one criterion; false when there are none.
    bool passed(int criterion) const {
        bool any = false;
        for (const auto& v : verdicts) {
            if (v.criterion == criterion) {
                any = true;
                if (!v.passed) {
                    return false;
                }
            }
        }
        return any;
    }

    io::Json to_json() const {
        using io::Json;
        const auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
        Json j;
        j["study"] = study;
        j["problem"] = problem;
        j["axis"] = axis;
        j["seed"] = seed;
        j["config"] = config;
        Json rows_json = Json::array();
        for (const auto& r : rows) {
            Json row{{"series", r.series},
                     {"axis", num(r.axis)},
                     {"point", r.point},
                     {"samples", r.samples},
                     {"mean", num(r.mean)},
                     {"reference", num(r.reference)},
                     {"error", num(r.error)},
                     {"variance", num(r.variance)},
                     {"standard_error", num(r.standard_error)},
                     {"mean_steps", num(r.mean_steps)},
                     {"mean_queries", num(r.mean_queries)},
                     {"wall_time", num(r.wall_time)}};
            for (const auto& [k, v] : r.extra) {
                row["extra"][k] = num(v);
            }
            rows_json.push_back(row);
        }
        j["rows"] = rows_json;
        Json verdicts_json = Json::array();
        for (const auto& v : verdicts) {
            verdicts_json.push_back({{"criterion", v.criterion},
                                     {"criterion_name", criterion_name(v.criterion)},
                                     {"check", v.check},
                                     {"passed", v.passed},
                                     {"detail", v.detail}});
        }
        j["verdicts"] = verdicts_json;
        j["passed"] = passed();
        return j;
    }

    std::string to_csv() const {
        std::ostringstream out;
        out.precision(17);
        out << "series,axis,point,samples,mean,reference,error,variance,standard_error,mean_steps,mean_queries,"
               "wall_time\n";
        for (const auto& r : rows) {
            out << r.series << ',' << r.axis << ',' << r.point << ',' << r.samples << ',' << r.mean << ','
                << r.reference << ',' << r.error << ',' << r.variance << ',' << r.standard_error << ','
                << r.mean_steps << ',' << r.mean_queries << ',' << r.wall_time << '\n';
        }
        return out.str();
    }

    /// Writes <dir>/<study>.json and <dir>/<study>.csv; returns the JSON path.
    std::string write(const std::string& dir) const {
        std::filesystem::create_directories(dir);
        const std::string stem = (std::filesystem::path(dir) / study).string();
        std::ofstream(stem + ".json") << to_json().dump(2) << '\n';
        std::ofstream(stem + ".csv") << to_csv();
        return stem + ".json";
    }

    /// One line per verdict.
    std::string summary() const {
        std::ostringstream out;
        for (const auto& v : verdicts) {
            out << (v.passed ? "pass " : "FAIL ") << "[" << v.criterion << " " << criterion_name(v.criterion) << "] "
                << v.check << ": " << v.detail << '\n';
        }
        return out.str();
    }
};

}  // namespace vcwos
