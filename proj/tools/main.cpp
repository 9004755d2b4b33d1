#include "lamforge/experiments.hpp"

int main(int argc, char** argv) { return lamforge::cli_dispatch(argc, argv); }
