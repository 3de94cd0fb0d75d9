# Asylum seeker matching with contracts: choice rules, cumulative offer and audits
