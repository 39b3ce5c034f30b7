// Regenerates the bundled corridor fixtures (env point clouds + scenarios).

#include <tendril/fixtures.hpp>

#include <cstdio>

int main(int argc, char** argv)
{
    const std::filesystem::path dir = (argc > 1) ? argv[1] : "fixtures";
    tendril::fixtures::write_all(dir);
    std::printf("wrote straight/lbend/sbend fixtures to %s\n", dir.string().c_str());
    return 0;
}
