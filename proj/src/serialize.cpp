#include "cafs/serialize.hpp"

#include <fstream>
#include <sstream>

namespace cafs {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

json instance_to_json(const Instance& inst) {
    json jobs = json::array();
    for (const Job& job : inst.jobs) {
        json ops = json::array();
        for (const OperationSpec& op : job.operations)
            ops.push_back({{"duration", op.duration}, {"power", op.power}});
        jobs.push_back(std::move(ops));
    }
    json doc{{"label", inst.label},
             {"machines", inst.machines},
             {"horizon", inst.horizon},
             {"period_hours", inst.period_hours},
             {"jobs", std::move(jobs)},
             {"carbon", inst.carbon_intensity},
             {"onsite", inst.onsite_available}};
    if (inst.prices) doc["prices"] = *inst.prices;
    return doc;
}

namespace {

template <typename T>
T get_field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string(key) + ": missing field");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string(key) + ": " + e.what());
    }
}

}  // namespace

Instance instance_from_json(const json& doc) {
    Instance inst;
    inst.label = get_field<std::string>(doc, "label");
    inst.machines = get_field<int>(doc, "machines");
    inst.horizon = get_field<int>(doc, "horizon");
    inst.period_hours = get_field<double>(doc, "period_hours");
    if (!doc.contains("jobs")) throw ParseError("jobs: missing field");
    const json& jobs = doc.at("jobs");
    if (!jobs.is_array()) throw ParseError("jobs: expected an array");
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const json& ops = jobs[i];
        if (!ops.is_array())
            throw ParseError("jobs[" + std::to_string(i + 1) + "]: expected an array of operations");
        Job job;
        for (std::size_t m = 0; m < ops.size(); ++m) {
            const json& op = ops[m];
            const std::string where =
                "jobs[" + std::to_string(i + 1) + "][" + std::to_string(m + 1) + "]";
            try {
                OperationSpec spec;
                spec.duration = op.at("duration").get<int>();
                spec.power = op.at("power").get<std::vector<double>>();
                job.operations.push_back(std::move(spec));
            } catch (const json::exception& e) {
                throw ParseError(where + ": " + e.what());
            }
        }
        inst.jobs.push_back(std::move(job));
    }
    inst.carbon_intensity = get_field<std::vector<double>>(doc, "carbon");
    inst.onsite_available = get_field<std::vector<double>>(doc, "onsite");
    if (doc.contains("prices")) inst.prices = get_field<std::vector<double>>(doc, "prices");
    return inst;
}

Instance load_instance(const std::string& path, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    Instance inst = instance_from_json(doc);
    validate_instance(inst);
    if (warnings) *warnings = instance_warnings(inst);
    return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
    write_text_file(path, instance_to_json(inst).dump(1) + "\n");
}

json schedule_to_json(const Schedule& sched) {
    const int machines = sched.machine_count;
    const int n = static_cast<int>(sched.start.size()) / std::max(machines, 1);
    json sequence = json::array();
    for (int job : sched.sequence) sequence.push_back(job + 1);
    json start = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int m = 0; m < machines; ++m) row.push_back(sched.start_at(i, m));
        start.push_back(std::move(row));
    }
    return json{{"sequence", std::move(sequence)},
                {"start", std::move(start)},
                {"completion", sched.completion},
                {"feasible", sched.feasible}};
}

Schedule schedule_from_json(const json& doc) {
    Schedule sched;
    const auto sequence = get_field<std::vector<int>>(doc, "sequence");
    for (int job : sequence) sched.sequence.push_back(job - 1);
    const auto start = get_field<std::vector<std::vector<int>>>(doc, "start");
    if (start.size() != sequence.size()) throw ParseError("start: row count != sequence length");
    sched.machine_count = start.empty() ? 0 : static_cast<int>(start.front().size());
    for (const auto& row : start) {
        if (static_cast<int>(row.size()) != sched.machine_count)
            throw ParseError("start: ragged rows");
        sched.start.insert(sched.start.end(), row.begin(), row.end());
    }
    sched.completion = get_field<int>(doc, "completion");
    sched.feasible = get_field<bool>(doc, "feasible");
    return sched;
}

Schedule load_schedule(const std::string& path) {
    std::string text = read_text_file(path);
    // skip a provenance line such as "enumerated=504"
    if (!text.empty() && text[0] != '{' && text[0] != '[') {
        const std::size_t eol = text.find('\n');
        if (eol != std::string::npos) text = text.substr(eol + 1);
    }
    try {
        return schedule_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_schedule(const Schedule& sched, const std::string& path,
                   const std::string& provenance_header) {
    std::string text;
    if (!provenance_header.empty()) text = provenance_header + "\n";
    text += schedule_to_json(sched).dump(1) + "\n";
    write_text_file(path, text);
}

}  // namespace cafs
