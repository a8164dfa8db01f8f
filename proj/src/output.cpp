#include <cmath>
#include <ostream>

#include "mmfso/sweep.hpp"

namespace mmfso {

namespace {

Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << "sweep_var,value,metric,estimate,half_width_95,n,tag\n";
    for (const auto& r : rows) {
        out << r.sweep_var << ',' << format_number(r.value) << ',' << r.metric << ','
            << format_number(r.estimate.mean) << ',' << format_number(r.estimate.half_width_95) << ','
            << r.estimate.n << ',' << to_string(r.estimate.tag) << '\n';
    }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows) {
    Json list = Json::array();
    for (const auto& r : rows) {
        Json o = Json::object();
        o["sweep_var"] = r.sweep_var;
        o["value"] = json_number(r.value);
        o["metric"] = r.metric;
        o["estimate"] = json_number(r.estimate.mean);
        o["half_width_95"] = json_number(r.estimate.half_width_95);
        o["n"] = r.estimate.n;
        o["tag"] = to_string(r.estimate.tag);
        list.push_back(std::move(o));
    }
    Json doc = Json::object();
    doc["rows"] = std::move(list);
    out << doc.dump(2) << '\n';
}

}  // namespace mmfso
