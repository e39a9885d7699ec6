#include "semiflex/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "semiflex/errors.hpp"

namespace semiflex {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha1_hex(const std::string& bytes) {
    uint32_t h0 = 0x67452301u, h1 = 0xEFCDAB89u, h2 = 0x98BADCFEu,
             h3 = 0x10325476u, h4 = 0xC3D2E1F0u;
    const uint64_t ml = static_cast<uint64_t>(bytes.size()) * 8u;
    std::string msg = bytes;
    msg.push_back('\x80');
    while (msg.size() % 64 != 56) msg.push_back('\0');
    for (int i = 7; i >= 0; --i)
        msg.push_back(static_cast<char>((ml >> (8 * i)) & 0xFF));

    auto rol = [](uint32_t v, int s) { return (v << s) | (v >> (32 - s)); };
    for (std::size_t off = 0; off < msg.size(); off += 64) {
        uint32_t w[80];
        for (int t = 0; t < 16; ++t)
            w[t] = (static_cast<uint32_t>(static_cast<uint8_t>(msg[off + 4 * t])) << 24) |
                   (static_cast<uint32_t>(static_cast<uint8_t>(msg[off + 4 * t + 1])) << 16) |
                   (static_cast<uint32_t>(static_cast<uint8_t>(msg[off + 4 * t + 2])) << 8) |
                   static_cast<uint32_t>(static_cast<uint8_t>(msg[off + 4 * t + 3]));
        for (int t = 16; t < 80; ++t)
            w[t] = rol(w[t - 3] ^ w[t - 8] ^ w[t - 14] ^ w[t - 16], 1);
        uint32_t a = h0, b = h1, c = h2, d = h3, e = h4;
        for (int t = 0; t < 80; ++t) {
            uint32_t f, kc;
            if (t < 20) {
                f = (b & c) | (~b & d);
                kc = 0x5A827999u;
            } else if (t < 40) {
                f = b ^ c ^ d;
                kc = 0x6ED9EBA1u;
            } else if (t < 60) {
                f = (b & c) | (b & d) | (c & d);
                kc = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                kc = 0xCA62C1D6u;
            }
            const uint32_t tmp = rol(a, 5) + f + e + kc + w[t];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = tmp;
        }
        h0 += a;
        h1 += b;
        h2 += c;
        h3 += d;
        h4 += e;
    }
    char buf[41];
    std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x%08x", h0, h1, h2, h3, h4);
    return buf;
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

struct CsvWriter::Impl {
    std::ofstream os;
    std::string path;
    bool closed = false;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->path = path;
    impl_->os.open(path, std::ios::binary);
    if (!impl_->os) {
        delete impl_;
        throw IOFailure("cannot open for writing: " + path);
    }
}

CsvWriter::~CsvWriter() {
    if (impl_) {
        if (!impl_->closed) impl_->os.flush();
        delete impl_;
    }
}

void CsvWriter::comment(const std::string& line) {
    impl_->os << "# " << line << "\n";
    if (!impl_->os) throw IOFailure("write failed: " + impl_->path);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    row(names);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) impl_->os << ',';
        impl_->os << csv_escape(cells[i]);
    }
    impl_->os << "\n";
    if (!impl_->os) throw IOFailure("write failed: " + impl_->path);
}

void CsvWriter::row_numeric(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) impl_->os << ',';
        impl_->os << format_g17(values[i]);
    }
    impl_->os << "\n";
    if (!impl_->os) throw IOFailure("write failed: " + impl_->path);
}

void CsvWriter::close() {
    if (impl_->closed) return;
    impl_->os.flush();
    impl_->os.close();
    if (impl_->os.fail()) throw IOFailure("close failed: " + impl_->path);
    impl_->closed = true;
}

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void write_svg_polylines(const std::string& path, const std::string& title,
                         const std::vector<SvgSeries>& series) {
    const double W = 960, H = 600, ML = 70, MR = 160, MT = 50, MB = 50;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOFailure("cannot open for writing: " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
       << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"18\">"
       << title << "</text>\n";
    os << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
       << "\" height=\"" << H - MT - MB
       << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    // corner tick labels
    os << "<text x=\"" << ML << "\" y=\"" << H - MB + 18
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt6(xmin)
       << "</text>\n";
    os << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 18
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << fmt6(xmax) << "</text>\n";
    os << "<text x=\"" << ML - 6 << "\" y=\"" << H - MB
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << fmt6(ymin) << "</text>\n";
    os << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 12
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
       << fmt6(ymax) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const std::string color =
            series[s].color.empty() ? palette[s % 8] : series[s].color;
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (i) os << ' ';
            os << fmt6(px(series[s].x[i])) << ',' << fmt6(py(series[s].y[i]));
        }
        os << "\"/>\n";
        const double ly = MT + 16 + 18 * static_cast<double>(s);
        os << "<line x1=\"" << W - MR + 10 << "\" y1=\"" << ly - 4 << "\" x2=\""
           << W - MR + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - MR + 40 << "\" y=\"" << ly
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label
           << "</text>\n";
    }
    os << "</svg>\n";
    os.flush();
    if (!os) throw IOFailure("write failed: " + path);
}

int max_threads() {
    const char* env = std::getenv("SEMIFLEX_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<int>(v) : 1;
}

} // namespace semiflex
