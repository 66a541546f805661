#include "sattn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sattn::io {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out << body;
        if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string configuration_to_json(const Configuration& c) {
    json j;
    j["dim"] = c.dim;
    j["n"] = c.size();
    j["points"] = c.points;
    j["weights"] = c.weights;
    return j.dump(2) + "\n";
}

Configuration configuration_from_json(const std::string& text) {
    const json j = json::parse(text);
    Configuration c;
    c.dim = j.at("dim").get<std::size_t>();
    c.points = j.at("points").get<std::vector<Vec>>();
    c.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("n") && j.at("n").get<std::size_t>() != c.points.size())
        throw std::invalid_argument("configuration_from_json: n does not match points");
    c.validate();
    return c;
}

std::string caps_to_json(const CapFamily& caps) {
    json j;
    j["centers"] = caps.centers;
    j["eps"] = caps.eps;
    return j.dump(2) + "\n";
}

CapFamily caps_from_json(const std::string& text) {
    const json j = json::parse(text);
    return CapFamily(j.at("centers").get<std::vector<Vec>>(), j.at("eps").get<double>());
}

std::string certificate_to_json(const SeparationCertificate& cert) {
    json j;
    j["caps"] = {{"centers", cert.caps.centers}, {"eps", cert.caps.eps}};
    j["assignment"] = cert.assignment;
    j["alpha"] = cert.alpha;
    j["gamma"] = cert.gamma;
    j["beta"] = cert.beta;
    j["eps"] = cert.eps;
    return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& traj, const SeparationCertificate* cert) {
    std::ostringstream out;
    out << "t,energy,energy_normalized,grad_norm,min_pair_dist";
    if (cert)
        for (std::size_t q = 0; q < cert->k(); ++q)
            out << ",eta_" << q << ",rho_" << q << ",var_" << q;
    out << "\n";
    for (const TraceRecord& r : traj.records) {
        out << fmt_double(r.t) << ',' << fmt_double(r.energy_raw) << ','
            << fmt_double(r.energy_normalized) << ',' << fmt_double(r.grad_norm) << ','
            << fmt_double(r.min_pair_dist);
        if (cert) {
            const auto stats = cap_statistics(r.config, *cert);
            for (const CapStats& s : stats) {
                out << ',' << (s.eta ? fmt_double(*s.eta) : "") << ','
                    << (s.rho ? fmt_double(*s.rho) : "") << ','
                    << (s.var ? fmt_double(*s.var) : "");
            }
        }
        out << "\n";
    }
    return out.str();
}

std::string pl_csv(const PlReport& rep) {
    std::ostringstream out;
    out << "t,H,bound,pass\n";
    for (const PlSample& s : rep.samples) {
        if (s.in_slow_manifold) continue;
        out << fmt_double(s.t) << ',' << fmt_double(s.H) << ',' << fmt_double(s.bound_weak) << ','
            << ((s.bound_ok && s.claim_ok && s.h_negative) ? 1 : 0) << "\n";
    }
    return out.str();
}

std::string pl_summary_json(const PlReport& rep) {
    json j;
    j["checks_total"] = rep.checks_total;
    j["checks_passed"] = rep.checks_passed;
    if (rep.first_failure_t)
        j["first_failure_t"] = *rep.first_failure_t;
    else
        j["first_failure_t"] = nullptr;
    j["lambda"] = rep.lambda;
    j["delta"] = rep.delta;
    j["kappa_strong"] = rep.kappa_strong;
    j["kappa_weak"] = rep.kappa_weak;
    return j.dump(2) + "\n";
}

std::string staircase_csv(const StaircaseProfile& prof) {
    std::ostringstream out;
    out << "s,energy_normalized,n_active,min_admissible_gap\n";
    for (std::size_t i = 0; i < prof.s.size(); ++i)
        out << fmt_double(prof.s[i]) << ',' << fmt_double(prof.energy_normalized[i]) << ','
            << prof.n_active[i] << ',' << fmt_double(prof.min_admissible_gap[i]) << "\n";
    return out.str();
}

std::string merge_events_json(const StaircaseProfile& prof) {
    json arr = json::array();
    for (const MergeEvent& e : prof.merge_events) {
        json j;
        j["time"] = e.time;
        j["indices"] = e.indices;
        j["weight"] = e.weight;
        j["position"] = e.position;
        j["multi_merge"] = e.multi_merge;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string meanfield_csv(const MfTrajectory& traj) {
    std::ostringstream out;
    const std::size_t k = traj.empty() ? 0 : traj.records.front().caps.size();
    out << "t";
    for (std::size_t q = 0; q < k; ++q) out << ",eta_" << q << ",V_" << q << ",support_ok_" << q;
    out << "\n";
    for (const MfTraceRecord& r : traj.records) {
        out << fmt_double(r.t);
        for (const MfCapRecord& c : r.caps)
            out << ',' << fmt_double(c.eta) << ',' << fmt_double(c.var) << ','
                << (c.support_ok ? 1 : 0);
        out << "\n";
    }
    return out.str();
}

}  // namespace sattn::io
