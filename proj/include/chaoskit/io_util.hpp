#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaoskit::io {

// Shortest round-trippable decimal form; keeps CSV output byte-stable across
// runs with identical configuration.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

// Flat "key = value" configuration text; '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct SvgCanvas {
    double width = 0, height = 0;
    std::string body;

    SvgCanvas(double w, double h) : width(w), height(h) {}
    void rect(double x, double y, double w, double h, const std::string& fill);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double stroke_width = 1.0);
    void text(double x, double y, const std::string& content, double size = 10.0);
    std::string render() const;
};

}  // namespace chaoskit::io
