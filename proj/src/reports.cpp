#include "qkd/reports.hpp"

#include <cstdio>
#include <sstream>

namespace qkd {

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// minimal ordered JSON object writer; values are pre-rendered
class ObjectWriter {
public:
    void field(const std::string& key, const std::string& rendered) {
        entries_.push_back("  \"" + key + "\": " + rendered);
    }
    void text(const std::string& key, const std::string& value) {
        std::string escaped;
        for (char c : value) {
            if (c == '"' || c == '\\') escaped += '\\';
            escaped += c;
        }
        field(key, "\"" + escaped + "\"");
    }
    void num(const std::string& key, double v) { field(key, format_double17(v)); }
    void num(const std::string& key, int64_t v) { field(key, std::to_string(v)); }
    void num(const std::string& key, int v) { field(key, std::to_string(v)); }
    void boolean(const std::string& key, bool v) { field(key, v ? "true" : "false"); }

    std::string str() const {
        std::string out = "{\n";
        for (size_t i = 0; i < entries_.size(); ++i)
            out += entries_[i] + (i + 1 < entries_.size() ? ",\n" : "\n");
        return out + "}\n";
    }

private:
    std::vector<std::string> entries_;
};

} // namespace

std::string report_json(const SecurityBoundReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "security_bound");
    w.text("manifest_id", manifest_id);
    w.num("n", r.n);
    w.num("delta", r.delta);
    w.num("epsilon", r.epsilon);
    w.num("bound", r.bound);
    w.boolean("vacuous", r.vacuous);
    w.num("sessions", r.sessions);
    w.boolean("has_empirical", r.has_empirical);
    w.num("empirical_bad_frequency", r.empirical_bad_frequency);
    w.num("bad_sessions", r.bad_sessions);
    w.num("aborted_sessions", r.aborted_sessions);
    w.num("boundary_sessions", r.boundary_sessions);
    w.num("c_model", r.c_model);
    w.num("mean_deficiency", r.mean_deficiency);
    w.text("caveat", r.caveat);
    return w.str();
}

std::string report_json(const SamplingTailReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "sampling_tail");
    w.text("manifest_id", manifest_id);
    w.num("n", r.n);
    w.num("p", r.p);
    w.num("epsilon", r.epsilon);
    w.num("trials", r.trials);
    w.num("joint_frequency", r.joint_frequency);
    w.num("hoeffding_bound", r.hoeffding_bound);
    w.num("max_std_error", r.max_std_error);
    w.num("worst_weight", r.worst_weight);
    std::string grid = "[";
    for (size_t i = 0; i < r.grid.size(); ++i) {
        grid += "[" + std::to_string(r.grid[i].first) + ", " +
                format_double17(r.grid[i].second) + "]";
        if (i + 1 < r.grid.size()) grid += ", ";
    }
    grid += "]";
    w.field("grid", grid);
    return w.str();
}

std::string report_json(const OtpExperimentReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "otp_experiment");
    w.text("manifest_id", manifest_id);
    w.num("m", r.m);
    w.num("delta", r.delta);
    w.num("dl_of_key", r.dl_of_key);
    w.num("threshold", r.threshold);
    w.num("c_model", r.c_model);
    w.num("b_delta_size", r.b_delta_size);
    w.num("bound", r.bound);
    w.boolean("exhaustive", r.exhaustive);
    w.boolean("holds", r.holds);
    w.text("caveat", r.caveat);
    return w.str();
}

std::string report_json(const PerturbationSweepReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "projection_perturbation_sweep");
    w.text("manifest_id", manifest_id);
    w.num("instances", r.instances);
    w.num("violations", r.violations);
    w.num("max_ratio", r.max_ratio);
    w.num("max_lhs", r.max_lhs);
    return w.str();
}

std::string report_json(const ListingSweepReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "listing_bound_sweep");
    w.text("manifest_id", manifest_id);
    w.num("instances", r.instances);
    w.num("violations", r.violations);
    w.num("max_distinguishability_residue", r.max_distinguishability_residue);
    w.num("max_projector_residue", r.max_projector_residue);
    w.num("max_coverage_residue", r.max_coverage_residue);
    w.num("max_ratio", r.max_ratio);
    return w.str();
}

std::string report_json(const CharacterSumSweepReport& r, const std::string& manifest_id) {
    ObjectWriter w;
    w.text("schema", "v1");
    w.text("report", "character_sum_sweep");
    w.text("manifest_id", manifest_id);
    w.num("codes", r.codes);
    w.num("triples", r.triples);
    w.num("violations", r.violations);
    w.num("max_n", r.max_n);
    return w.str();
}

} // namespace qkd
