#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace reslab::cli {

/// Plot-ready CSV from a pipeline artifact:
///   counting-curve    h,count      -> log10(1/h),log10(N)
///   resonance-set     resonances   -> re_z/h,im_z/h
///   dimension-fit     eps,count    -> log10(1/eps),log10(count)
///   modulus-counting  k,N,r,count  -> r,log10(N),log10(count)
/// Throws UnknownArtifactKind, IoError.
void emit_plotdata(const std::filesystem::path& artifact, std::string_view kind, std::ostream& out);

}  // namespace reslab::cli
