#include "tamed/harness.hpp"

int main(int argc, char** argv) { return tamed::harness::main_entry(argc, argv); }
