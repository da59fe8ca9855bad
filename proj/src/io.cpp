#include <jerkpath/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace jerkpath {

namespace {

using json = nlohmann::json;

// Line and column of a byte offset, and the waypoint row open at that point when the text has
// a waypoints array.
std::string locate(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k < byte; ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    std::string out = "line " + std::to_string(line) + ", column " + std::to_string(column);
    const std::size_t key = text.find("\"waypoints\"");
    if (key != std::string::npos && key < byte) {
        int depth = 0;
        long row = -1;
        for (std::size_t k = key; k < byte; ++k) {
            if (text[k] == '[') {
                if (++depth == 2) {
                    ++row;
                }
            } else if (text[k] == ']') {
                --depth;
            }
        }
        if (depth >= 2) {
            out = "waypoint row " + std::to_string(row) + " (" + out + ")";
        }
    }
    return out;
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw parse_error(source + ": invalid JSON at " + locate(text, byte));
    }
}

double finite_number(const json& value, const std::string& source, const std::string& field) {
    if (!value.is_number()) {
        throw parse_error(source + ": " + field + " is not a number");
    }
    const double x = value.get<double>();
    if (!std::isfinite(x)) {
        throw parse_error(source + ": " + field + " is not finite");
    }
    return x;
}

std::vector<double> number_list(const json& root, const char* key, const std::string& source) {
    if (!root.contains(key) || !root[key].is_array()) {
        throw parse_error(source + ": missing array field \"" + key + "\"");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < root[key].size(); ++k) {
        out.push_back(finite_number(root[key][k], source, std::string(key) + "[" + std::to_string(k) + "]"));
    }
    return out;
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// Splits one CSV line at commas.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_cell(const std::string& cell, const std::string& where) {
    double x = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
        throw parse_error(where + ": \"" + cell + "\" is not a finite number");
    }
    return x;
}

}  // namespace

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw invalid_argument_error("cannot open " + file.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw invalid_argument_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw invalid_argument_error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, file, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw invalid_argument_error("cannot replace " + file.string());
    }
}

std::vector<point> parse_path(const std::string& text, const std::string& source) {
    const json root = parse_json(text, source);
    if (!root.is_object()) {
        throw parse_error(source + ": expected a JSON object");
    }
    if (!root.contains("dimensions") || !root["dimensions"].is_number_integer() || root["dimensions"].get<long>() < 1) {
        throw parse_error(source + ": \"dimensions\" must be a positive integer");
    }
    const auto d = root["dimensions"].get<std::size_t>();
    if (!root.contains("waypoints") || !root["waypoints"].is_array()) {
        throw parse_error(source + ": missing array field \"waypoints\"");
    }
    const json& rows = root["waypoints"];
    if (rows.size() < 2) {
        throw parse_error(source + ": a path needs at least 2 waypoints, found " + std::to_string(rows.size()));
    }
    std::vector<point> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = "waypoint row " + std::to_string(r);
        if (!rows[r].is_array() || rows[r].size() != d) {
            throw parse_error(source + ": " + where + " must hold " + std::to_string(d) + " values");
        }
        point p;
        for (std::size_t i = 0; i < d; ++i) {
            p.push_back(finite_number(rows[r][i], source, where + ", value " + std::to_string(i)));
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::string format_path(const std::vector<point>& samples) {
    if (samples.empty()) {
        throw invalid_argument_error("no samples to write");
    }
    json root;
    root["dimensions"] = samples.front().size();
    root["waypoints"] = samples;
    return root.dump(1) + "\n";
}

std::vector<point> load_path(const std::filesystem::path& file) {
    return parse_path(read_file(file), file.string());
}

void save_path(const std::filesystem::path& file, const std::vector<point>& samples) {
    write_file_atomic(file, format_path(samples));
}

limits_config parse_limits(const std::string& text, const std::string& source) {
    const json root = parse_json(text, source);
    if (!root.is_object()) {
        throw parse_error(source + ": expected a JSON object");
    }
    limits_config out;
    out.v_max = number_list(root, "v_max", source);
    out.a_max = number_list(root, "a_max", source);
    out.j_max = number_list(root, "j_max", source);
    if (root.contains("jerk_limit_factor")) {
        out.jerk_limit_factor = finite_number(root["jerk_limit_factor"], source, "jerk_limit_factor");
    }
    try {
        out.check();
    } catch (const invalid_argument_error& e) {
        throw parse_error(source + ": " + e.what());
    }
    return out;
}

std::string format_limits(const limits_config& limits) {
    json root;
    root["v_max"] = limits.v_max;
    root["a_max"] = limits.a_max;
    root["j_max"] = limits.j_max;
    root["jerk_limit_factor"] = limits.jerk_limit_factor;
    return root.dump(2) + "\n";
}

limits_config load_limits(const std::filesystem::path& file) {
    return parse_limits(read_file(file), file.string());
}

void save_limits(const std::filesystem::path& file, const limits_config& limits) {
    write_file_atomic(file, format_limits(limits));
}

trajectory_table sample_trajectories(const std::vector<trajectory>& motions, double dt) {
    if (motions.empty() || !(dt > 0.0)) {
        throw invalid_argument_error("sampling needs at least one trajectory and a positive time step");
    }
    double duration = 0.0;
    for (const trajectory& m : motions) {
        duration = std::max(duration, m.duration());
    }
    const auto n = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
    trajectory_table out;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = std::min(static_cast<double>(k) * dt, duration);
        out.t.push_back(t);
        std::vector<double> p, v, a, j;
        for (const trajectory& m : motions) {
            const kinematic_state s = m.sample(t);
            p.push_back(s.position);
            v.push_back(s.velocity);
            a.push_back(s.acceleration);
            j.push_back(m.jerk_at(t));
        }
        out.p.push_back(std::move(p));
        out.v.push_back(std::move(v));
        out.a.push_back(std::move(a));
        out.j.push_back(std::move(j));
    }
    return out;
}

std::string format_trajectory_csv(const trajectory_table& table) {
    const std::size_t d = table.dimensions();
    std::string out = "t";
    for (const char* q : {"p", "v", "a", "j"}) {
        for (std::size_t i = 0; i < d; ++i) {
            out += std::string(",") + q + "_" + std::to_string(i);
        }
    }
    out += "\n";
    for (std::size_t k = 0; k < table.t.size(); ++k) {
        out += format_number(table.t[k]);
        for (const auto* column : {&table.p, &table.v, &table.a, &table.j}) {
            for (const double x : (*column)[k]) {
                out += "," + format_number(x);
            }
        }
        out += "\n";
    }
    return out;
}

trajectory_table parse_trajectory_csv(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw parse_error(source + ": empty file");
    }
    const std::vector<std::string> header = split(line);
    if (header.empty() || header.front() != "t" || (header.size() - 1) % 4 != 0 || header.size() < 5) {
        throw parse_error(source + ": header must be t,p_0..,v_0..,a_0..,j_0..");
    }
    const std::size_t d = (header.size() - 1) / 4;
    const char* names[] = {"p", "v", "a", "j"};
    for (std::size_t q = 0; q < 4; ++q) {
        for (std::size_t i = 0; i < d; ++i) {
            const std::string expected = std::string(names[q]) + "_" + std::to_string(i);
            if (header[1 + q * d + i] != expected) {
                throw parse_error(source + ": header column " + std::to_string(1 + q * d + i) + " is \"" + header[1 + q * d + i] +
                                  "\", expected \"" + expected + "\"");
            }
        }
    }
    trajectory_table out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> cells = split(line);
        const std::string where = source + ": line " + std::to_string(line_no);
        if (cells.size() != header.size()) {
            throw parse_error(where + " has " + std::to_string(cells.size()) + " fields, expected " + std::to_string(header.size()));
        }
        out.t.push_back(parse_cell(cells[0], where + ", field t"));
        for (std::size_t q = 0; q < 4; ++q) {
            std::vector<double> row;
            for (std::size_t i = 0; i < d; ++i) {
                const std::size_t c = 1 + q * d + i;
                row.push_back(parse_cell(cells[c], where + ", field " + header[c]));
            }
            (q == 0 ? out.p : q == 1 ? out.v : q == 2 ? out.a : out.j).push_back(std::move(row));
        }
    }
    if (out.t.empty()) {
        throw parse_error(source + ": no samples");
    }
    return out;
}

trajectory_table load_trajectory(const std::filesystem::path& file) {
    return parse_trajectory_csv(read_file(file), file.string());
}

void save_trajectory(const std::filesystem::path& file, const trajectory_table& table) {
    write_file_atomic(file, format_trajectory_csv(table));
}

metrics_report make_metrics(const iterate_result& result) {
    metrics_report out;
    const iteration_result& best = result.best();
    out.duration_s = best.duration;
    out.deviation_mean_rad = best.deviation.mean;
    out.deviation_max_rad = best.deviation.max;
    out.best_iteration = result.best_index + 1;
    out.slowest_dimension = result.slowest_dim;
    out.slowest_duration_s = result.slowest_duration;
    for (std::size_t k = 0; k < result.iterations.size(); ++k) {
        const iteration_result& it = result.iterations[k];
        iteration_metrics m;
        m.iteration = k + 1;
        m.ok = it.ok;
        m.error = it.error;
        m.duration_s = it.duration;
        m.deviation_mean_rad = it.deviation.mean;
        m.deviation_max_rad = it.deviation.max;
        for (const tracked_dimension& d : it.dims) {
            m.violation_regions += d.violations.size();
        }
        out.per_iteration.push_back(std::move(m));
    }
    return out;
}

std::string format_metrics(const metrics_report& report) {
    json root;
    root["duration_s"] = report.duration_s;
    root["deviation_mean_rad"] = report.deviation_mean_rad;
    root["deviation_max_rad"] = report.deviation_max_rad;
    root["best_iteration"] = report.best_iteration;
    root["slowest_dimension"] = report.slowest_dimension;
    root["slowest_duration_s"] = report.slowest_duration_s;
    root["per_iteration"] = json::array();
    for (const iteration_metrics& m : report.per_iteration) {
        json it;
        it["iteration"] = m.iteration;
        it["ok"] = m.ok;
        it["error"] = m.error;
        it["duration_s"] = m.duration_s;
        it["deviation_mean_rad"] = m.deviation_mean_rad;
        it["deviation_max_rad"] = m.deviation_max_rad;
        it["violation_regions"] = m.violation_regions;
        root["per_iteration"].push_back(std::move(it));
    }
    return root.dump(2) + "\n";
}

metrics_report parse_metrics(const std::string& text, const std::string& source) {
    const json root = parse_json(text, source);
    try {
        metrics_report out;
        out.duration_s = root.at("duration_s").get<double>();
        out.deviation_mean_rad = root.at("deviation_mean_rad").get<double>();
        out.deviation_max_rad = root.at("deviation_max_rad").get<double>();
        out.best_iteration = root.at("best_iteration").get<std::size_t>();
        out.slowest_dimension = root.at("slowest_dimension").get<std::size_t>();
        out.slowest_duration_s = root.at("slowest_duration_s").get<double>();
        for (const json& it : root.at("per_iteration")) {
            iteration_metrics m;
            m.iteration = it.at("iteration").get<std::size_t>();
            m.ok = it.at("ok").get<bool>();
            m.error = it.at("error").get<std::string>();
            m.duration_s = it.at("duration_s").get<double>();
            m.deviation_mean_rad = it.at("deviation_mean_rad").get<double>();
            m.deviation_max_rad = it.at("deviation_max_rad").get<double>();
            m.violation_regions = it.at("violation_regions").get<std::size_t>();
            out.per_iteration.push_back(std::move(m));
        }
        return out;
    } catch (const json::exception& e) {
        throw parse_error(source + ": " + e.what());
    }
}

metrics_report load_metrics(const std::filesystem::path& file) {
    return parse_metrics(read_file(file), file.string());
}

void save_metrics(const std::filesystem::path& file, const metrics_report& report) {
    write_file_atomic(file, format_metrics(report));
}

}  // namespace jerkpath
