#include "app.hpp"

int main(int argc, char** argv) { return increx::app::main_entry(argc, argv); }
