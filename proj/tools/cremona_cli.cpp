// cremona — exact-arithmetic engine for plane curves and linear systems as
// combinatorial divisor data: validation, adjoints, classification, Cremona
// minimal models, Noether-Castelnuovo factorization.
//
// Usage: cremona <command> [options] [input.json]
// Commands: validate adjoint classify minimize factor forest sharp flat
//           natural reduce oracle

#include <iostream>

#include "cremona/json_io.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cremona::run_cli(args, std::cout, std::cerr);
}
