// Copyright (C) 2026 The vtc authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sstream>

#include "vtc/errors.hpp"
#include "vtc/pipeline.hpp"

namespace vtc {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

nlohmann::json eval_result_to_json(const EvalResult& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["config"] = r.config_label;
    j["tokens_in"] = r.tokens_in;
    j["tokens_out"] = r.tokens_out;
    if (r.reconstruction_mae) j["reconstruction_mae"] = *r.reconstruction_mae;
    if (r.boundary_recall) j["boundary_recall"] = *r.boundary_recall;
    j["runtime_seconds"] = r.runtime_seconds;
    return j;
}

EvalResult eval_result_from_json(const nlohmann::json& j) {
    EvalResult r;
    r.method = j.at("method").get<std::string>();
    r.config_label = j.at("config").get<std::string>();
    r.tokens_in = j.at("tokens_in").get<std::int64_t>();
    r.tokens_out = j.at("tokens_out").get<std::int64_t>();
    if (j.contains("reconstruction_mae"))
        r.reconstruction_mae = j.at("reconstruction_mae").get<double>();
    if (j.contains("boundary_recall")) r.boundary_recall = j.at("boundary_recall").get<double>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
    return r;
}

std::string render_csv(const std::vector<EvalResult>& rows) {
    std::string out =
        "method,config,tokens_in,tokens_out,reconstruction_mae,boundary_recall,"
        "runtime_seconds\n";
    for (const EvalResult& r : rows) {
        if (r.method.find(',') != std::string::npos ||
            r.config_label.find(',') != std::string::npos)
            throw FormatError("csv: method and config labels must not contain commas");
        out += r.method + "," + r.config_label + "," + std::to_string(r.tokens_in) + "," +
               std::to_string(r.tokens_out) + ",";
        if (r.reconstruction_mae) out += fmt_double(*r.reconstruction_mae);
        out += ",";
        if (r.boundary_recall) out += fmt_double(*r.boundary_recall);
        out += "," + fmt_double(r.runtime_seconds) + "\n";
    }
    return out;
}

std::vector<EvalResult> parse_eval_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line)) throw FormatError("csv: empty input");
    const std::string expected_header =
        "method,config,tokens_in,tokens_out,reconstruction_mae,boundary_recall,"
        "runtime_seconds";
    if (line != expected_header) throw FormatError("csv: unexpected header: " + line);
    std::vector<EvalResult> rows;
    std::int64_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7)
            throw FormatError("csv: line " + std::to_string(line_no) + " has " +
                              std::to_string(f.size()) + " fields, expected 7");
        EvalResult r;
        try {
            r.method = f[0];
            r.config_label = f[1];
            r.tokens_in = std::stoll(f[2]);
            r.tokens_out = std::stoll(f[3]);
            if (!f[4].empty()) r.reconstruction_mae = std::stod(f[4]);
            if (!f[5].empty()) r.boundary_recall = std::stod(f[5]);
            r.runtime_seconds = std::stod(f[6]);
        } catch (const std::exception&) {
            throw FormatError("csv: line " + std::to_string(line_no) + " has a malformed field");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string render_markdown(const std::vector<EvalResult>& rows,
                            const std::vector<nlohmann::json>& run_reports) {
    std::string out = "# Evaluation report\n";

    std::vector<const EvalResult*> compression;
    std::vector<const EvalResult*> sampling;
    for (const EvalResult& r : rows) {
        if (r.reconstruction_mae) compression.push_back(&r);
        if (r.boundary_recall) sampling.push_back(&r);
    }

    if (!compression.empty()) {
        out += "\n## Compression\n\n";
        out += "| method | config | tokens in | tokens out | reconstruction MAE | runtime (s) |\n";
        out += "|---|---|---:|---:|---:|---:|\n";
        for (const EvalResult* r : compression) {
            out += "| " + r->method + " | " + r->config_label + " | " +
                   std::to_string(r->tokens_in) + " | " + std::to_string(r->tokens_out) + " | " +
                   fmt_double(*r->reconstruction_mae) + " | " + fmt_double(r->runtime_seconds) +
                   " |\n";
        }
    }

    if (!sampling.empty()) {
        out += "\n## Frame sampling\n\n";
        out += "| method | config | boundary recall | runtime (s) |\n";
        out += "|---|---|---:|---:|\n";
        for (const EvalResult* r : sampling) {
            out += "| " + r->method + " | " + r->config_label + " | " +
                   fmt_double(*r->boundary_recall) + " | " + fmt_double(r->runtime_seconds) +
                   " |\n";
        }
    }

    if (!run_reports.empty()) {
        out += "\n## Pretraining runs\n\n";
        out += "| constraint | steps | final 50-step mean loss | diverged |\n";
        out += "|---|---:|---:|---|\n";
        for (const nlohmann::json& rep : run_reports) {
            const std::string constraint =
                rep.at("config").at("compressor").at("latent_constraint").get<std::string>();
            const auto& losses = rep.at("losses");
            const std::int64_t steps = static_cast<std::int64_t>(losses.size());
            const std::int64_t window = std::min<std::int64_t>(50, steps);
            double tail = 0.0;
            for (std::int64_t i = steps - window; i < steps; ++i)
                tail += losses.at(static_cast<std::size_t>(i)).get<double>();
            const std::string final_ma = window > 0 ? fmt_double(tail / window) : "";
            const bool diverged = rep.at("diverged").get<bool>();
            out += "| " + constraint + " | " + std::to_string(steps) + " | " + final_ma + " | " +
                   (diverged ? "yes" : "no") + " |\n";
        }
    }
    return out;
}

}  // namespace vtc
