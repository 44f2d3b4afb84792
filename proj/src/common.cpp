// Copyright 2026 The Artigen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>

#include "artigen/error.hpp"
#include "artigen/geometry.hpp"

namespace artigen {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kSyntax: return "SYNTAX";
    case Errc::kSchema: return "SCHEMA";
    case Errc::kVocab: return "VOCAB";
    case Errc::kInvalid: return "INVALID";
    case Errc::kOutOfCanon: return "OUT_OF_CANON";
    case Errc::kMalformed: return "MALFORMED";
    case Errc::kInverted: return "INVERTED";
    case Errc::kResolution: return "RESOLUTION";
    case Errc::kEmptyPart: return "EMPTY_PART";
    case Errc::kEmptyGrid: return "EMPTY_GRID";
    case Errc::kInvalidJoint: return "INVALID_JOINT";
    case Errc::kDegenerateAxis: return "DEGENERATE_AXIS";
    case Errc::kShapeMismatch: return "SHAPE_MISMATCH";
    case Errc::kTooManyParts: return "TOO_MANY_PARTS";
    case Errc::kNanLoss: return "NAN_LOSS";
    case Errc::kEmptyCloud: return "EMPTY_CLOUD";
    case Errc::kTypeMismatch: return "TYPE_MISMATCH";
    case Errc::kNotMovable: return "NOT_MOVABLE";
    case Errc::kNotApplicable: return "NOT_APPLICABLE";
    case Errc::kLengthMismatch: return "LENGTH_MISMATCH";
    case Errc::kInvalidBlueprint: return "INVALID_BLUEPRINT";
    case Errc::kXmlSyntax: return "XML_SYNTAX";
    case Errc::kUnsupportedElement: return "UNSUPPORTED_ELEMENT";
    case Errc::kIo: return "IO";
  }
  return "UNKNOWN";
}

std::string format_real(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

double canonical_real(double x) {
  return std::strtod(format_real(x).c_str(), nullptr);
}

}  // namespace artigen
