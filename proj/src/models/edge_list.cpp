#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wlpost/models/ergm.hpp"

namespace wlpost {

namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& what)
{
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + what);
}

bool blank_or_comment(const std::string& s)
{
    for (char ch : s) {
        if (ch == '#')
            return true;
        if (!std::isspace(static_cast<unsigned char>(ch)))
            return false;
    }
    return true;
}

}  // namespace

ErgmGraph parse_edge_list(std::istream& is, const std::string& source)
{
    std::string line;
    int line_no = 0;
    int n = -1;
    while (std::getline(is, line)) {
        ++line_no;
        if (blank_or_comment(line))
            continue;
        std::istringstream ls(line);
        long long count;
        std::string rest;
        if (!(ls >> count) || (ls >> rest))
            fail(source, line_no, "expected the node count on the first data line");
        if (count < 1 || count > 100000)
            fail(source, line_no, "node count out of range");
        n = static_cast<int>(count);
        break;
    }
    if (n < 0)
        fail(source, line_no, "missing node count");

    ErgmGraph g(n);
    while (std::getline(is, line)) {
        ++line_no;
        if (blank_or_comment(line))
            continue;
        std::istringstream ls(line);
        long long i, j;
        std::string rest;
        if (!(ls >> i >> j) || (ls >> rest))
            fail(source, line_no, "malformed edge line '" + line + "'");
        if (i < 1 || j < 1 || i > n || j > n)
            fail(source, line_no, "node id out of range 1.." + std::to_string(n));
        if (i == j)
            fail(source, line_no, "self-loop " + std::to_string(i) + " " + std::to_string(j));
        const int a = static_cast<int>(i) - 1;
        const int b = static_cast<int>(j) - 1;
        if (g.edge(a, b))
            fail(source, line_no, "duplicate edge " + std::to_string(i) + " " + std::to_string(j));
        g.set_edge(a, b, true);
    }
    return g;
}

ErgmGraph load_edge_list(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_edge_list: cannot open " + path);
    return parse_edge_list(is, path);
}

}  // namespace wlpost
