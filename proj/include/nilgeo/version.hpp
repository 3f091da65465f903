#ifndef NILGEO_VERSION_HPP
#define NILGEO_VERSION_HPP

namespace nilgeo {

inline constexpr const char* version_string = "0.1.0";

} // namespace nilgeo

#endif
