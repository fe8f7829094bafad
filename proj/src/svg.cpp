#include "acrosense/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace acrosense::svg {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kMarginLeft = 64.0, kMarginRight = 20.0;
constexpr double kMarginTop = 36.0, kMarginBottom = 48.0;

const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                          "#66ccee", "#aa3377", "#bbbbbb", "#000000"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

struct Scale {
    double lo, hi, pix_lo, pix_hi;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (pix_lo + pix_hi);
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

void open_svg(std::ofstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2
        << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << title << "</text>\n";
}

void axes(std::ofstream& out, const std::string& xlabel, const std::string& ylabel) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom
        << "\" x2=\"" << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\""
        << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">" << ylabel
        << "</text>\n";
}

}  // namespace

void write_scatter(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<int>& cluster, const std::string& title,
                   const std::filesystem::path& path) {
    if (x.size() != y.size() || x.size() != cluster.size()) {
        throw ValidationError("write_scatter: length mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    if (!x.empty()) {
        xlo = *std::min_element(x.begin(), x.end());
        xhi = *std::max_element(x.begin(), x.end());
        ylo = *std::min_element(y.begin(), y.end());
        yhi = *std::max_element(y.begin(), y.end());
    }
    const Scale sx{xlo, xhi, kMarginLeft + 8, kWidth - kMarginRight - 8};
    const Scale sy{ylo, yhi, kHeight - kMarginBottom - 8, kMarginTop + 8};

    open_svg(out, title);
    axes(out, "component 1", "component 2");
    for (std::size_t i = 0; i < x.size(); ++i) {
        const char* color = kPalette[static_cast<std::size_t>(cluster[i]) % 8];
        out << "<circle cx=\"" << fmt(sx(x[i])) << "\" cy=\"" << fmt(sy(y[i]))
            << "\" r=\"3\" fill=\"" << color << "\" fill-opacity=\"0.7\"/>\n";
    }
    out << "</svg>\n";
}

void write_learning_curve(const std::vector<CurveSeries>& series,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());

    double xlo = 1e300, xhi = -1e300;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            xlo = std::min(xlo, static_cast<double>(p.train_size));
            xhi = std::max(xhi, static_cast<double>(p.train_size));
        }
    }
    if (xlo > xhi) {
        xlo = 0;
        xhi = 1;
    }
    const Scale sx{xlo, xhi, kMarginLeft + 10, kWidth - kMarginRight - 10};
    const Scale sy{0.0, 1.0, kHeight - kMarginBottom, kMarginTop};

    open_svg(out, "holdout accuracy vs training size");
    axes(out, "training size", "accuracy");
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % 8];
        const auto& pts = series[si].points;

        std::string band_fwd, band_rev;
        std::string line;
        for (const auto& p : pts) {
            if (p.degenerate) continue;
            const double px = sx(p.train_size);
            band_fwd += fmt(px) + "," +
                        fmt(sy(std::min(1.0, p.mean_accuracy + p.std_accuracy))) + " ";
            band_rev = fmt(px) + "," +
                       fmt(sy(std::max(0.0, p.mean_accuracy - p.std_accuracy))) + " " +
                       band_rev;
            line += (line.empty() ? "M" : "L") + fmt(px) + " " + fmt(sy(p.mean_accuracy));
        }
        if (!band_fwd.empty()) {
            out << "<polygon points=\"" << band_fwd << band_rev << "\" fill=\"" << color
                << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }
        if (!line.empty()) {
            out << "<path d=\"" << line << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
        }
        for (const auto& p : pts) {
            if (p.degenerate) continue;
            out << "<circle cx=\"" << fmt(sx(p.train_size)) << "\" cy=\""
                << fmt(sy(p.mean_accuracy)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        out << "<text x=\"" << kWidth - kMarginRight - 8 << "\" y=\""
            << kMarginTop + 16 * (si + 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\""
            << color << "\">" << series[si].name << "</text>\n";
    }
    out << "</svg>\n";
}

void write_importance_bars(const std::vector<eval::ChannelImportance>& importance,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());

    double hi = 0.0;
    for (const auto& ci : importance) hi = std::max(hi, ci.mean_drop + ci.std_drop);
    if (hi <= 0.0) hi = 1.0;
    const Scale sx{0.0, hi, kMarginLeft, kWidth - kMarginRight};

    open_svg(out, "permutation importance (accuracy drop)");
    const double n = static_cast<double>(importance.size());
    const double band = (kHeight - kMarginTop - kMarginBottom) / std::max(1.0, n);
    for (std::size_t i = 0; i < importance.size(); ++i) {
        const auto& ci = importance[i];
        const double y0 = kMarginTop + band * static_cast<double>(i) + band * 0.15;
        const double h = band * 0.7;
        const double w = sx(std::max(0.0, ci.mean_drop)) - sx(0.0);
        out << "<rect x=\"" << fmt(sx(0.0)) << "\" y=\"" << fmt(y0) << "\" width=\""
            << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"#4477aa\"/>\n";
        const double cy = y0 + h / 2;
        out << "<line x1=\"" << fmt(sx(std::max(0.0, ci.mean_drop - ci.std_drop)))
            << "\" y1=\"" << fmt(cy) << "\" x2=\"" << fmt(sx(ci.mean_drop + ci.std_drop))
            << "\" y2=\"" << fmt(cy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fmt(cy + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << ci.name << "</text>\n";
    }
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "</svg>\n";
}

}  // namespace acrosense::svg
