#include "paraode/bench.hpp"

int main(int argc, char** argv) { return paraode::run_cli(argc, argv); }
