#include <cstdio>

int main() {
  std::fprintf(stderr, "rumor: command-line front end not wired up yet\n");
  return 1;
}
