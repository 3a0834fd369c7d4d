///
/// \file error.hpp
///
/// Exception type shared by every stage of the recovery pipeline.
///
#ifndef SPARSE_PHASE_ERROR_HPP
#define SPARSE_PHASE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <string_view>

namespace sparse_phase
{

enum class ErrorKind
{
    InvalidSignal,
    InvalidArgument,
    NumericalFailure,
    DegenerateInput,
    RankDeficient,
    SingularMatrix,
    InconsistentSystem,
    RootCountMismatch,
    EmptyModel,
    NotTriangular,
    UnmatchedDistance,
    AmbiguousCase,
    PoolInconsistent,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind)
    {
        case ErrorKind::InvalidSignal:
            return "InvalidSignal";
        case ErrorKind::InvalidArgument:
            return "InvalidArgument";
        case ErrorKind::NumericalFailure:
            return "NumericalFailure";
        case ErrorKind::DegenerateInput:
            return "DegenerateInput";
        case ErrorKind::RankDeficient:
            return "RankDeficient";
        case ErrorKind::SingularMatrix:
            return "SingularMatrix";
        case ErrorKind::InconsistentSystem:
            return "InconsistentSystem";
        case ErrorKind::RootCountMismatch:
            return "RootCountMismatch";
        case ErrorKind::EmptyModel:
            return "EmptyModel";
        case ErrorKind::NotTriangular:
            return "NotTriangular";
        case ErrorKind::UnmatchedDistance:
            return "UnmatchedDistance";
        case ErrorKind::AmbiguousCase:
            return "AmbiguousCase";
        case ErrorKind::PoolInconsistent:
            return "PoolInconsistent";
    }
    return "Unknown";
}

///
/// Exception carrying an error category and, once it has passed through the
/// recovery pipeline, the name of the stage that raised it.
///
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
          m_kind(kind),
          m_detail(detail)
    {
    }

    ErrorKind kind() const noexcept
    {
        return m_kind;
    }

    /// Empty unless the error was re-raised by recover_signal.
    const std::string& stage() const noexcept
    {
        return m_stage;
    }

    const std::string& detail() const noexcept
    {
        return m_detail;
    }

    /// Copy of this error tagged with the pipeline stage that raised it.
    Error with_stage(std::string stage) const
    {
        return Error(m_kind, std::move(stage), m_detail);
    }

private:
    Error(ErrorKind kind, std::string stage, const std::string& detail)
        : std::runtime_error("stage " + stage + ": " +
                             std::string(to_string(kind)) + ": " + detail),
          m_kind(kind),
          m_stage(std::move(stage)),
          m_detail(detail)
    {
    }

    ErrorKind m_kind;
    std::string m_stage;
    std::string m_detail;
};

} // namespace sparse_phase

#endif /* SPARSE_PHASE_ERROR_HPP */
