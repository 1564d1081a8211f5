#include <cstdio>
#include <cstring>
#include <string>

#include "hardy/acceptance.hpp"

int main(int argc, char** argv) {
  std::string data = "data";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--data") == 0 && i + 1 < argc)
      data = argv[++i];
    else {
      std::fprintf(stderr, "usage: acceptance [--data DIR]\n");
      return 2;
    }
  }
  return hardy::acceptance_run_and_report(data);
}
