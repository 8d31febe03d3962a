// io.hpp — deterministic CSV tables and minimal static SVG plots.
#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace granular {

// fixed 17-significant-digit formatting so identical runs produce identical bytes
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format_number(values[i]);
        out_ << "\n";
    }
    void row_mixed(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << values[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

// polyline/heatmap SVG, enough for front diagrams and density snapshots
class SvgPlot {
  public:
    SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, int w = 640, int h = 480)
        : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi), w_(w), h_(h) {
        body_ += "<rect width='100%' height='100%' fill='white'/>\n";
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color) {
        std::string pts;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            pts += std::to_string(px(xs[i])) + "," + std::to_string(py(ys[i])) + " ";
        }
        body_ += "<polyline fill='none' stroke='" + color + "' stroke-width='1.5' points='" + pts +
                 "'/>\n";
    }

    void cell(double x0, double x1, double y0, double y1, double shade01) {
        const int g = int(255 * (1.0 - std::min(std::max(shade01, 0.0), 1.0)));
        body_ += "<rect x='" + std::to_string(px(x0)) + "' y='" + std::to_string(py(y1)) +
                 "' width='" + std::to_string(px(x1) - px(x0)) + "' height='" +
                 std::to_string(py(y0) - py(y1)) + "' fill='rgb(" + std::to_string(g) + "," +
                 std::to_string(g) + ",255)'/>\n";
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("SvgPlot: cannot open " + path);
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w_ << "' height='" << h_
            << "'>\n"
            << body_ << "</svg>\n";
    }

  private:
    int px(double x) const { return int((x - x_lo_) / (x_hi_ - x_lo_) * (w_ - 20)) + 10; }
    int py(double y) const { return h_ - 10 - int((y - y_lo_) / (y_hi_ - y_lo_) * (h_ - 20)); }

    double x_lo_, x_hi_, y_lo_, y_hi_;
    int w_, h_;
    std::string body_;
};

}  // namespace granular
