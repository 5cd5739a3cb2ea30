// Stand-in flow evaluator speaking the newline-delimited JSON protocol:
// one request per line on stdin, one response per line on stdout.

#include <iostream>
#include <string>

#include "mfid/airfoil.hpp"

int main()
{
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty())
            continue;
        std::cout << mfid::airfoil::serve_mock_request(line) << '\n' << std::flush;
    }
    return 0;
}
