#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlpost/validation.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria runner"};
    std::vector<int> criteria;
    std::string cache_dir = "acceptance-runs";
    bool quiet = false;
    app.add_option("--criterion", criteria, "Criterion number(s) 1..11; all when omitted")
        ->check(CLI::Range(1, 11));
    app.add_option("--cache", cache_dir, "Directory for cached runs");
    app.add_flag("--quiet", quiet, "Suppress progress messages");
    CLI11_PARSE(app, argc, argv);

    if (criteria.empty())
        for (int c = 1; c <= 11; ++c)
            criteria.push_back(c);

    wlpost::ValidationOptions opts;
    opts.cache_dir = cache_dir;
    opts.log = quiet ? nullptr : &std::cerr;
    opts.full = true;
    std::filesystem::create_directories(cache_dir);

    bool all = true;
    for (int c : criteria) {
        const auto r = wlpost::run_check(c, opts);
        std::cout << wlpost::one_line(r) << std::endl;
        std::cout << "  details: " << wlpost::to_json(r).at("details").dump() << std::endl;
        all = all && r.pass;
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
