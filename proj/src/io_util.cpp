#include "chaoskit/io_util.hpp"

#include <istream>
#include <sstream>

#include "chaoskit/errors.hpp"

namespace chaoskit::io {

std::map<std::string, std::string> parse_key_values(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + " has empty key");
        out[key] = value;
    }
    return out;
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill) {
    body += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
            "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double stroke_width) {
    body += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
            "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
            num(stroke_width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke, double stroke_width) {
    body += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
            num(stroke_width) + "\" points=\"";
    for (const auto& [x, y] : pts) body += num(x) + "," + num(y) + " ";
    body += "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size) {
    body += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
            "\" font-family=\"monospace\">" + content + "</text>\n";
}

std::string SvgCanvas::render() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
        << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' '
        << num(height) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body << "</svg>\n";
    return out.str();
}

}  // namespace chaoskit::io
