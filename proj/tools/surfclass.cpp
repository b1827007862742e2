// Placeholder entry point; the full command set lands with the library.
#include <cstdio>

int main() {
  std::puts("surfclass: commands not wired up yet");
  return 2;
}
