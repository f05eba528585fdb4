#include "relaylearn/cli.hpp"

int main(int argc, char** argv) { return relay::cli_main(argc, argv); }
