#include "optomech/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "optomech/config.hpp"
#include "optomech/errors.hpp"

namespace optomech {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_header(std::ostream& out, const std::string& command, const std::string& resolved_config) {
    out << "# optomech " << OPTOMECH_VERSION << "\n";
    out << "# command: " << command << "\n";
    std::istringstream in(resolved_config);
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

namespace {

void matrix_rows(std::ostream& out, const std::string& kind, const Eigen::MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            write_row(out, {kind, std::to_string(i), std::to_string(j), format_double(m(i, j).real()),
                            format_double(m(i, j).imag())});
        }
    }
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

const char* frame_name(Frame f) { return f == Frame::rotating ? "rotating" : "absolute"; }
const char* gamma_name(GammaKind g) { return g == GammaKind::diagonal_rates ? "diagonal_rates" : "input_coupling"; }

}  // namespace

void write_system_csv(std::ostream& out, const LinearLangevinSystem& sys) {
    write_row(out, {"kind", "i", "j", "re", "im"});
    write_row(out, {"name", sys.name, "", "", ""});
    write_row(out, {"frame", frame_name(sys.frame), "", "", ""});
    write_row(out, {"gamma_kind", gamma_name(sys.gamma_kind), "", "", ""});
    for (std::size_t i = 0; i < sys.basis.size(); ++i) {
        write_row(out, {"basis", std::to_string(i), sys.basis[i], std::to_string(sys.basis_partner[i]), ""});
    }
    for (std::size_t i = 0; i < sys.channels.size(); ++i) {
        write_row(out, {"channel", std::to_string(i), sys.channels[i], std::to_string(sys.channel_partner[i]), ""});
    }
    matrix_rows(out, "M", sys.M);
    matrix_rows(out, "gamma", sys.gamma);
    matrix_rows(out, "input_map", sys.input_map);
    for (Eigen::Index k = 0; k < sys.noise_psd_pos.size(); ++k) {
        write_row(out, {"noise_pos", std::to_string(k), "0", format_double(sys.noise_psd_pos(k)), "0"});
    }
    for (Eigen::Index k = 0; k < sys.noise_psd_neg.size(); ++k) {
        write_row(out, {"noise_neg", std::to_string(k), "0", format_double(sys.noise_psd_neg(k)), "0"});
    }
    for (Eigen::Index k = 0; k < sys.drive.size(); ++k) {
        write_row(out, {"drive", std::to_string(k), "0", format_double(sys.drive(k).real()),
                        format_double(sys.drive(k).imag())});
    }
    for (const auto& [key, v] : sys.metadata) write_row(out, {"meta", key, "", format_double(v), ""});
    for (auto w : sys.warnings) {
        std::replace(w.begin(), w.end(), ',', ';');
        write_row(out, {"warning", "\"" + w + "\"", "", "", ""});
    }
}

LinearLangevinSystem read_system_csv(std::istream& in) {
    LinearLangevinSystem sys;
    struct Entry {
        std::string kind;
        long i, j;
        double re, im;
    };
    std::vector<Entry> entries;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line != "kind,i,j,re,im") throw ConfigError("system CSV: unexpected header", line_no);
            continue;
        }
        const auto c = split(line);
        if (c.size() != 5) throw ConfigError("system CSV: expected 5 columns", line_no);
        const std::string& kind = c[0];
        try {
            if (kind == "name") {
                sys.name = c[1];
            } else if (kind == "frame") {
                sys.frame = c[1] == "absolute" ? Frame::absolute : Frame::rotating;
            } else if (kind == "gamma_kind") {
                sys.gamma_kind = c[1] == "input_coupling" ? GammaKind::input_coupling : GammaKind::diagonal_rates;
            } else if (kind == "basis") {
                sys.basis.push_back(c[2]);
                sys.basis_partner.push_back(std::stoi(c[3]));
            } else if (kind == "channel") {
                sys.channels.push_back(c[2]);
                sys.channel_partner.push_back(std::stoi(c[3]));
            } else if (kind == "meta") {
                sys.metadata.emplace_back(c[1], parse_number(c[3], "meta"));
            } else if (kind == "warning") {
                std::string w = c[1];
                if (w.size() >= 2 && w.front() == '"' && w.back() == '"') w = w.substr(1, w.size() - 2);
                sys.warnings.push_back(w);
            } else {
                entries.push_back({kind, std::stol(c[1]), std::stol(c[2]), parse_number(c[3], kind),
                                   parse_number(c[4], kind)});
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("system CSV: ") + e.what(), line_no);
        }
    }
    const auto n = static_cast<Eigen::Index>(sys.basis.size());
    const auto k = static_cast<Eigen::Index>(sys.channels.size());
    sys.M = Eigen::MatrixXcd::Zero(n, n);
    sys.gamma = Eigen::MatrixXcd::Zero(n, n);
    sys.input_map = Eigen::MatrixXcd::Zero(n, k);
    sys.noise_psd_pos = Eigen::VectorXd::Zero(k);
    sys.noise_psd_neg = Eigen::VectorXd::Zero(k);
    sys.drive = Eigen::VectorXcd::Zero(n);
    for (const auto& e : entries) {
        const cplx v(e.re, e.im);
        auto in_range = [&](Eigen::Index r, Eigen::Index c) {
            if (e.i < 0 || e.j < 0 || e.i >= r || e.j >= c) throw ValidationError("system CSV: index out of range");
        };
        if (e.kind == "M") { in_range(n, n); sys.M(e.i, e.j) = v; }
        else if (e.kind == "gamma") { in_range(n, n); sys.gamma(e.i, e.j) = v; }
        else if (e.kind == "input_map") { in_range(n, k); sys.input_map(e.i, e.j) = v; }
        else if (e.kind == "noise_pos") { in_range(k, 1); sys.noise_psd_pos(e.i) = e.re; }
        else if (e.kind == "noise_neg") { in_range(k, 1); sys.noise_psd_neg(e.i) = e.re; }
        else if (e.kind == "drive") { in_range(n, 1); sys.drive(e.i) = v; }
        else throw ValidationError("system CSV: unknown row kind '" + e.kind + "'");
    }
    sys.check_consistency();
    return sys;
}

}  // namespace optomech
