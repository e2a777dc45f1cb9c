// Stand-in for an external analyzer: copies a canned SARIF file to the
// requested output path, optionally sleeping or exiting nonzero first.
//
//   mock_analyzer --sarif FILE --out PATH [--exit N] [--sleep SECONDS]
//                 [--count FILE] [--no-output]

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

int main(int argc, char** argv) {
  std::string sarif, out, count;
  int exit_code = 0;
  double sleep_s = 0;
  bool no_output = false;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << a << "\n";
        std::exit(64);
      }
      return argv[++i];
    };
    if (a == "--sarif") sarif = next();
    else if (a == "--out") out = next();
    else if (a == "--exit") exit_code = std::atoi(next().c_str());
    else if (a == "--sleep") sleep_s = std::atof(next().c_str());
    else if (a == "--count") count = next();
    else if (a == "--no-output") no_output = true;
    else if (a == "--target") next();
    else {
      std::cerr << "unknown argument " << a << "\n";
      return 64;
    }
  }
  if (!count.empty()) {
    std::ofstream c(count, std::ios::app);
    c << "run\n";
  }
  if (sleep_s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
  if (!no_output) {
    std::ifstream in(sarif, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read " << sarif << "\n";
      return 66;
    }
    std::ofstream o(out, std::ios::binary | std::ios::trunc);
    o << in.rdbuf();
  }
  std::cerr << "mock analyzer done\n";
  return exit_code;
}
