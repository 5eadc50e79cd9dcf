// SPDX-License-Identifier: Apache-2.0
//
// ftmsim - deterministic simulator of Wi-Fi FTM (IEEE 802.11mc) round-trip ranging
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ftmsim {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- value / contract errors ------------------------------------------------

class InvariantViolation : public Error {
  public:
    using Error::Error;
};

class MalformedFrame : public Error {
  public:
    using Error::Error;
};

class UnsupportedBandwidth : public Error {
  public:
    using Error::Error;
};

class NegativeDistance : public Error {
  public:
    using Error::Error;
};

class NonPositiveDistance : public Error {
  public:
    using Error::Error;
};

class InvalidExponent : public Error {
  public:
    using Error::Error;
};

class EmptySample : public Error {
  public:
    using Error::Error;
};

class DegenerateComparison : public Error {
  public:
    using Error::Error;
};

// -- protocol runtime outcomes surfaced as errors ---------------------------

class ProtocolViolation : public Error {
  public:
    using Error::Error;
};

/// A frame failed the delivery threshold in either direction of an exchange.
class NoResponse : public Error {
  public:
    using Error::Error;
};

/// An incoming measurement frame was rejected by the duplicate packet-number check.
class ReplayRejected : public Error {
  public:
    using Error::Error;
};

/// Every exchange of a burst came back NoResponse.
class AllFramesDropped : public Error {
  public:
    using Error::Error;
};

// -- configuration / input errors -------------------------------------------

class ParseError : public Error {
  public:
    using Error::Error;
};

class ValidationError : public Error {
  public:
    using Error::Error;
};

class UnknownPreset : public Error {
  public:
    using Error::Error;
};

class MalformedLog : public Error {
  public:
    using Error::Error;
};

}  // namespace ftmsim
