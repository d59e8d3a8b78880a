#include "scarfsim/io.hpp"

#include <cmath>
#include <sstream>

namespace scarfsim::io {

std::string json_number(double v) {
    if (!std::isfinite(v)) return "null";
    return format_double(v);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_vec(const Vec3& v) {
    return "[" + json_number(v[0]) + "," + json_number(v[1]) + "," + json_number(v[2]) + "]";
}

std::string to_csv(const Trajectory& traj) {
    std::ostringstream os;
    os << "t,p1,p2,p3,E1,E2,E3,g,phi\n";
    for (const Sample& s : traj.samples) {
        os << format_double(s.t) << ',' << format_double(s.p[0]) << ',' << format_double(s.p[1])
           << ',' << format_double(s.p[2]) << ',' << format_double(s.E[0]) << ','
           << format_double(s.E[1]) << ',' << format_double(s.E[2]) << ',' << format_double(s.g)
           << ',' << format_double(s.phi) << '\n';
    }
    return os.str();
}

namespace {

std::string termination_json(const Trajectory& traj) {
    std::ostringstream os;
    os << "\"termination\":\"" << to_string(traj.termination) << "\"";
    if (traj.termination == Termination::ReachedBoundary) {
        os << ",\"boundary_index\":" << traj.boundary_index
           << ",\"boundary_is_node\":" << (traj.boundary_is_node ? "true" : "false");
        if (traj.boundary_is_node) os << ",\"node_vertex\":" << traj.node_vertex;
        os << ",\"extrapolated_boundary_time\":" << json_number(traj.extrapolated_boundary_time);
    }
    if (traj.termination == Termination::PriceWentNegative)
        os << ",\"negative_index\":" << traj.negative_index;
    os << ",\"max_integral_drift\":" << json_number(traj.max_integral_drift);
    if (!traj.message.empty()) os << ",\"message\":\"" << json_escape(traj.message) << "\"";
    return os.str();
}

}  // namespace

std::string to_json(const Trajectory& traj) {
    std::ostringstream os;
    os << "{" << termination_json(traj) << ",\"samples\":[";
    bool first = true;
    for (const Sample& s : traj.samples) {
        if (!first) os << ',';
        first = false;
        os << "{\"t\":" << json_number(s.t) << ",\"p\":" << json_vec(s.p)
           << ",\"E\":" << json_vec(s.E) << ",\"g\":" << json_number(s.g)
           << ",\"phi\":" << json_number(s.phi) << "}";
    }
    os << "]}";
    return os.str();
}

std::string to_json(const StabilityReport& r) {
    std::ostringstream os;
    os << "{\"H\":" << json_number(r.H) << ",\"Hhat\":" << json_number(r.Hhat)
       << ",\"S\":" << json_number(r.S) << ",\"jacobian_eigenvalues\":[["
       << json_number(r.jacobian_eigenvalues[0].real()) << ','
       << json_number(r.jacobian_eigenvalues[0].imag()) << "],["
       << json_number(r.jacobian_eigenvalues[1].real()) << ','
       << json_number(r.jacobian_eigenvalues[1].imag()) << "]],\"C_eigenvalues\":["
       << json_number(r.C_eigenvalues[0]) << ',' << json_number(r.C_eigenvalues[1])
       << "],\"local_class\":\"" << to_string(r.local_class) << "\",\"globally_stable\":"
       << (r.globally_stable ? "true" : "false") << "}";
    return os.str();
}

std::string to_json(const EndowmentParams& p) {
    std::ostringstream os;
    os << "{\"d1\":" << json_number(p.d1) << ",\"d2\":" << json_number(p.d2)
       << ",\"d3\":" << json_number(p.d3) << ",\"K\":" << json_number(p.K)
       << ",\"L\":" << json_number(p.L) << "}";
    return os.str();
}

std::string to_json(const EndowmentMatrix& A) {
    std::ostringstream os;
    os << "{\"a\":[";
    for (int i = 0; i < 3; ++i) {
        if (i) os << ',';
        os << json_vec(A.a.row(i));
    }
    os << "]}";
    return os.str();
}

std::string to_json(const EdgeFixedPoint& fp, const EdgeMinExcess& m) {
    std::ostringstream os;
    os << "{\"edge\":" << fp.edge << ",\"point\":" << json_vec(fp.point.as_array())
       << ",\"own_excess\":" << json_number(fp.own_excess) << ",\"locally_stable_on_simplex\":"
       << (fp.locally_stable_on_simplex ? "true" : "false") << ",\"prediction\":\""
       << (fp.locally_stable_on_simplex ? "Attracting" : "Repelling")
       << "\",\"edge_min_excess\":{\"min_value\":" << json_number(m.min_value)
       << ",\"argmin_ratio\":" << json_number(m.argmin_ratio) << ",\"positive_on_edge\":"
       << (m.positive_on_edge ? "true" : "false") << "}}";
    return os.str();
}

std::string to_json(const Figure1Result& r) {
    std::ostringstream os;
    os << "{\"pass\":" << (r.pass ? "true" : "false") << ",\"params\":" << to_json(r.params)
       << ",\"p0\":" << json_vec(r.p0) << ",\"H\":" << json_number(r.H)
       << ",\"Hhat\":" << json_number(r.Hhat) << ",\"forward\":{\"termination\":\""
       << to_string(r.forward.termination) << "\",\"final\":" << json_vec(r.forward_final)
       << ",\"distance_to_barycenter\":" << json_number(r.forward_final_distance)
       << ",\"t_end\":" << json_number(r.forward.back().t) << "},\"backward\":{\"termination\":\""
       << to_string(r.backward.termination) << "\",\"final\":" << json_vec(r.backward.back().p)
       << ",\"node_vertex\":" << r.backward.node_vertex
       << ",\"trigger_time\":" << json_number(r.backward.back().t)
       << ",\"extrapolated_time\":" << json_number(r.backward_extrapolated_time)
       << "},\"detail\":\"" << json_escape(r.detail) << "\"}";
    return os.str();
}

std::string to_json(const UniquenessReport& r) {
    std::ostringstream os;
    os << "{\"grid_n\":" << r.grid_n << ",\"zeros\":[";
    for (std::size_t i = 0; i < r.zeros.size(); ++i) {
        if (i) os << ',';
        os << json_vec(r.zeros[i]);
    }
    os << "],\"zero_norms\":[";
    for (std::size_t i = 0; i < r.zero_norms.size(); ++i) {
        if (i) os << ',';
        os << json_number(r.zero_norms[i]);
    }
    os << "],\"min_norm_outside\":" << json_number(r.min_norm_outside) << "}";
    return os.str();
}

std::string record_json(const TrajectoryRecord& rec) {
    std::ostringstream os;
    os << "{\"sample\":" << rec.sample << ",\"start\":" << rec.start
       << ",\"params\":" << to_json(rec.params) << ",\"H\":" << json_number(rec.H)
       << ",\"Hhat\":" << json_number(rec.Hhat) << ",\"local_class\":\""
       << to_string(rec.local_class) << "\",\"p0\":" << json_vec(rec.p0)
       << ",\"termination\":\"" << to_string(rec.termination) << "\",\"t_end\":"
       << json_number(rec.t_end) << ",\"converge_time\":" << json_number(rec.converge_time)
       << ",\"final_ray_distance\":" << json_number(rec.final_ray_distance)
       << ",\"max_integral_drift\":" << json_number(rec.max_integral_drift)
       << ",\"cycle_detected\":" << (rec.cycle_detected ? "true" : "false")
       << ",\"cycle_period\":" << json_number(rec.cycle_period) << ",\"returns_shrinking\":"
       << (rec.returns_shrinking ? "true" : "false") << "}";
    return os.str();
}

std::string to_jsonl(const SweepOutcome& out) {
    std::ostringstream os;
    for (const auto& rec : out.records) os << record_json(rec) << '\n';
    return os.str();
}

std::string summary_json(const SweepOutcome& out) {
    std::ostringstream os;
    os << "{\"config\":{\"sample_count\":" << out.cfg.sample_count << ",\"seed\":" << out.cfg.seed
       << ",\"region\":\"" << to_string(out.cfg.region)
       << "\",\"starts_per_sample\":" << out.cfg.starts_per_sample
       << ",\"t_max\":" << json_number(out.cfg.t_max)
       << ",\"convergence_radius\":" << json_number(out.cfg.convergence_radius)
       << ",\"min_d\":" << json_number(out.cfg.min_d)
       << ",\"start_margin\":" << json_number(out.cfg.start_margin)
       << ",\"sampling\":\"flat Dirichlet over (d1,d2,d3,K+L), K-L uniform over the "
          "nonnegative-entry interval, rejection for the region\"}"
       << ",\"total\":" << out.records.size() << ",\"counts\":{\"converged\":" << out.converged
       << ",\"time_exhausted\":" << out.time_exhausted
       << ",\"cycle_suspected\":" << out.cycle_suspected << ",\"other\":" << out.other << "}";
    os << ",\"non_convergent_records\":[";
    bool first = true;
    for (const auto& rec : out.records) {
        if (rec.termination == Termination::LimitCycleSuspected ||
            rec.termination == Termination::PriceWentNegative ||
            rec.termination == Termination::ReachedBoundary ||
            rec.termination == Termination::StepFailure) {
            if (!first) os << ',';
            first = false;
            os << record_json(rec);
        }
    }
    os << "]}";
    return os.str();
}

}  // namespace scarfsim::io
