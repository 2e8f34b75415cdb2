#pragma once

#include <string>

#include "arganno/document.hpp"

namespace arganno {

/// Parses one AAE essay from brat standoff content: the essay text plus an
/// .ann file with T (component), R (relation), and A (stance attribute)
/// lines. Component types MajorClaim/Claim/Premise map to MC/Cl/Pr spans
/// with char-range units; R lines become linked relations; Stance attributes
/// on claims become unlinked relations against an empty target.
AnnotatedDocument parse_brat_essay(const std::string& txt_content,
                                   const std::string& ann_content,
                                   const std::string& doc_id = "");

}  // namespace arganno
