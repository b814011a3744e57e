#pragma once

#include <complex>
#include <sstream>
#include <string>

#include "lmoment/lmoment.hpp"

namespace testing_support {

// The bundled first even Maass form, loaded once per binary.
inline const lmoment::HeckeSystem& maass()
{
    static const auto f = lmoment::HeckeSystem::load_file(LMOMENT_DATA);
    return f;
}

inline lmoment::HeckeSystem parse(const std::string& text)
{
    std::istringstream in(text);
    return lmoment::HeckeSystem::load(in);
}

}  // namespace testing_support
