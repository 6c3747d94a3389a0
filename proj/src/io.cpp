#include "rsle/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rsle::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open output file: " + path);
    out << std::setprecision(17);
    return out;
}

} // namespace

void write_driving_csv(const std::string& path, const dyson::DrivingPath& dp) {
    auto out = open_out(path);
    out << "t";
    for (std::size_t i = 0; i < dp.n_particles(); ++i) out << ",theta_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k < dp.times.size(); ++k) {
        out << dp.times[k];
        for (double th : dp.states[k].angles) out << "," << th;
        out << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<loewner::FlowPoint>& snapshots) {
    if (times.size() != snapshots.size())
        throw DomainError("write_trajectory_csv: times/snapshots size mismatch");
    auto out = open_out(path);
    out << "t,re_g,im_g,re_logdg,im_logdg,swallowed\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& fp = snapshots[k];
        out << times[k] << "," << fp.g.real() << "," << fp.g.imag() << ","
            << fp.log_dg.real() << "," << fp.log_dg.imag() << ","
            << (fp.swallowed() ? 1 : 0) << "\n";
    }
}

void write_mask_csv(const std::string& path, const loewner::HullMask& mask) {
    auto out = open_out(path);
    out << "re_z,im_z,swallow_time\n";
    for (std::size_t k = 0; k < mask.points.size(); ++k) {
        out << mask.points[k].real() << "," << mask.points[k].imag() << ",";
        if (mask.swallow_time[k]) out << *mask.swallow_time[k];
        out << "\n";
    }
}

void write_curve_csv(const std::string& path, const hydro::HullCurve& curve) {
    auto out = open_out(path);
    out << "param,re,im\n";
    for (const auto& [p, z] : curve.samples)
        out << p << "," << z.real() << "," << z.imag() << "\n";
}

void write_density_csv(const std::string& path, const std::vector<double>& phis,
                       const std::vector<double>& rhos) {
    if (phis.size() != rhos.size())
        throw DomainError("write_density_csv: grid/value size mismatch");
    auto out = open_out(path);
    out << "phi,rho\n";
    for (std::size_t k = 0; k < phis.size(); ++k)
        out << phis[k] << "," << rhos[k] << "\n";
}

void write_hull_svg(const std::string& path, const hydro::HullCurve& curve,
                    const loewner::HullMask* mask) {
    auto out = open_out(path);
    const double lo = -1.05, hi = 1.05;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<!-- hull boundary at t=" << curve.t
        << "; strokes: circle #888, curve #c00, mask #99c -->\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << lo << " " << lo
        << " " << (hi - lo) << " " << (hi - lo) << "\" width=\"640\" height=\"640\">\n"
        << "  <g transform=\"scale(1,-1)\">\n";
    if (mask) {
        for (std::size_t k = 0; k < mask->points.size(); ++k) {
            if (!mask->swallow_time[k]) continue;
            out << "    <circle cx=\"" << mask->points[k].real() << "\" cy=\""
                << mask->points[k].imag() << "\" r=\"0.006\" fill=\"#99c\"/>\n";
        }
    }
    out << "    <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#888\" "
           "stroke-width=\"0.004\"/>\n";
    for (int sign = 0; sign < 2; ++sign) {
        out << "    <polyline fill=\"none\" stroke=\"#c00\" stroke-width=\"0.006\" points=\"";
        for (const auto& [p, z] : curve.samples) {
            (void)p;
            out << z.real() << "," << (sign ? -z.imag() : z.imag()) << " ";
        }
        out << "\"/>\n";
    }
    out << "  </g>\n</svg>\n";
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open file for hashing: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

} // namespace rsle::io
