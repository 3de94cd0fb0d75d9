# Exhaustive property, stability and manipulation audits
