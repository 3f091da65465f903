#ifndef NILGEO_ERRORS_HPP
#define NILGEO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nilgeo {

/// Base error carrying a stable machine-readable code alongside the message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), m_code(std::move(code)) {}

  const std::string& code() const { return m_code; }

private:
  std::string m_code;
};

#define NILGEO_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                            \
  public:                                                                \
    explicit Name(const std::string& what) : Error(#Name, what) {}       \
  }

NILGEO_DEFINE_ERROR(ZeroQuaternion);
NILGEO_DEFINE_ERROR(IndexOutOfRange);
NILGEO_DEFINE_ERROR(ContextMismatch);
NILGEO_DEFINE_ERROR(BasisClosureFailure);
NILGEO_DEFINE_ERROR(InvolutionInvalid);
NILGEO_DEFINE_ERROR(DegenerateSplit);
NILGEO_DEFINE_ERROR(NotReal);
NILGEO_DEFINE_ERROR(NotHermitian);
NILGEO_DEFINE_ERROR(RankDeficiency);
NILGEO_DEFINE_ERROR(StepUnderflow);
NILGEO_DEFINE_ERROR(SigmaSingular);
NILGEO_DEFINE_ERROR(JUnavailable);
NILGEO_DEFINE_ERROR(JNotSquareMinusOne);
NILGEO_DEFINE_ERROR(OriginExcluded);
NILGEO_DEFINE_ERROR(NotInCkappa);
NILGEO_DEFINE_ERROR(GridUnderflow);
NILGEO_DEFINE_ERROR(TailDivergence);
NILGEO_DEFINE_ERROR(NoConvergence);
NILGEO_DEFINE_ERROR(TargetNotNilpotent);
NILGEO_DEFINE_ERROR(TargetNotReal);
NILGEO_DEFINE_ERROR(MomentMismatch);
NILGEO_DEFINE_ERROR(WrongChamber);
NILGEO_DEFINE_ERROR(UnknownFixture);
NILGEO_DEFINE_ERROR(UnknownSuite);
NILGEO_DEFINE_ERROR(ConfigInvalid);
NILGEO_DEFINE_ERROR(SuiteMismatch);

#undef NILGEO_DEFINE_ERROR

} // namespace nilgeo

#endif
