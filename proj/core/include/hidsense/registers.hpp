#pragma once

// Special-function register decoding for the PIC18F4550 registers the sensor
// firmware configures: ADCON0/1/2, T0CON, INTCON, plus the port direction and
// Timer0 reload bytes.

#include "hidsense/common.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hidsense::registers {

constexpr int kAnalogChannels = 13;  // AN0..AN12

struct RegisterFile {
  std::uint8_t adcon0 = 0x00;
  std::uint8_t adcon1 = 0x00;
  std::uint8_t adcon2 = 0x00;
  std::uint8_t t0con = 0x00;
  std::uint8_t intcon = 0x00;
  std::uint8_t intcon2 = 0x00;
  std::uint8_t intcon3 = 0x00;
  std::uint8_t trisa = 0x00;
  std::uint8_t trisb = 0x00;
  std::uint8_t tmr0l_reload = 0x00;

  /// State after System_init, Interrupt_Dis, Timer0_init and Interrupt_En
  /// of the reference firmware have run (T0CON has TMR0ON set).
  static RegisterFile reference();

  friend bool operator==(const RegisterFile&, const RegisterFile&) = default;
};

struct Adcon0 {
  int channel = 0;
  bool go_done = false;
  bool enabled = false;
  /// CHS selections 1101..1111 select no channel on this part.
  bool unimplemented = false;
};

struct Adcon1 {
  bool vref_minus_external = false;  // VCFG1: AN2 instead of VSS
  bool vref_plus_external = false;   // VCFG0: AN3 instead of VDD
  std::array<bool, kAnalogChannels> analog{};  // index k -> ANk

  int analog_count() const;
};

enum class ClockDivider { Fosc2, Fosc4, Fosc8, Fosc16, Fosc32, Fosc64, FRC };

struct Adcon2 {
  bool right_justified = false;
  int acquisition_tad = 0;
  ClockDivider clock_divider = ClockDivider::Fosc2;
};

struct T0con {
  bool enabled = false;
  bool eight_bit_mode = false;
  bool prescaler_assigned = false;
  int prescale = 1;  // 1 when the prescaler is bypassed

  friend bool operator==(const T0con&, const T0con&) = default;
};

struct Intcon {
  bool gie = false;
  bool peie = false;
  bool tmr0ie = false;
  bool int0ie = false;
  bool rbie = false;
  bool tmr0if = false;
  bool int0if = false;
  bool rbif = false;

  friend bool operator==(const Intcon&, const Intcon&) = default;
};

Adcon0 decode_adcon0(std::uint8_t value);
Adcon1 decode_adcon1(std::uint8_t value);
Adcon2 decode_adcon2(std::uint8_t value);
T0con decode_t0con(std::uint8_t value);
Intcon decode_intcon(std::uint8_t value);

/// Inverse of decode_adcon2 over the implemented bits. Throws ConfigError for
/// an acquisition time outside the ACQT table. FRC encodes as 0b111.
std::uint8_t encode_adcon2(const Adcon2& fields);

std::string_view to_string(ClockDivider divider);

/// Combined ADC view of the register file.
struct AdcConfig {
  int channel = 0;
  bool enabled = false;
  bool right_justified = false;
  int acquisition_tad = 0;
  ClockDivider clock_divider = ClockDivider::Fosc2;
  bool vref_plus_external = false;
  bool vref_minus_external = false;
  int analog_channel_count = 0;
  bool an0_analog = false;
};

struct Timer0Config {
  bool enabled = false;
  bool eight_bit_mode = false;
  int prescale = 1;
  int reload = 0;
  bool overflow_interrupt_enabled = false;
};

AdcConfig adc_config(const RegisterFile& regs);

/// overflow_interrupt_enabled requires both GIE and TMR0IE.
Timer0Config timer0_config(const RegisterFile& regs);

enum class Severity { Warning, Fatal };

struct Finding {
  Severity severity = Severity::Warning;
  std::string message;
};

/// Compares regs against the reference firmware configuration. Empty iff
/// ADCON1, ADCON2, TRISA, TRISB, T0CON (enabled, 8-bit, 1:256), INTCON and
/// the Timer0 reload all match. Findings that make the sensor pipeline
/// meaningless (AN0 not analog, RA0 not an input) are Fatal.
std::vector<Finding> validate_firmware_config(const RegisterFile& regs);

bool has_fatal(const std::vector<Finding>& findings);

/// Register names accepted by decode_named / RegisterFile::set.
std::optional<std::uint8_t RegisterFile::*> field_by_name(std::string_view name);

/// name=value lines for the `decode` CLI. nullopt for an unknown register.
std::optional<std::vector<std::pair<std::string, std::string>>> decode_named(
    std::string_view reg, std::uint8_t value);

}  // namespace hidsense::registers
